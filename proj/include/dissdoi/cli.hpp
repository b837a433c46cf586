#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace dissdoi {

struct RunConfig {
  std::string command;
  std::uint64_t seed = 1;
  int trials = 1;
  int dim = 4;
  double sigma = 1.0;
  int truncation = 4000;
  std::optional<double> tol;  // check tolerance; per-command default when absent
  std::string instance;
  std::string function;
  std::string out;
  std::string csv;
  int workers = 1;
  std::string style = "normal";
  double spread = 0.1;
  std::string formula = "glafor";
  std::string kind = "lipschitz";
  double alpha = 0.5;
  double p = 2.0;
};

/// Throws InvalidArgument on an out-of-range setting.
void validate(const RunConfig& config);

/// 0 when every check passes, 1 on a failed check, 2 on a bad configuration
/// or unreadable input.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs; parse errors give exit status 2.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dissdoi
