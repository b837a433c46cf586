#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "dissdoi/bandfun.hpp"
#include "dissdoi/dissipative.hpp"
#include "dissdoi/doi.hpp"

namespace dissdoi {

using Json = nlohmann::ordered_json;

Json to_json(const ComplexMatrix& a);
/// Throws ParseError on a malformed record.
ComplexMatrix matrix_from_json(const Json& j);

Json to_json(const GeneratedInstance& inst);

struct Instance {
  CommutingDissipativePair first;
  CommutingDissipativePair second;
  std::uint64_t seed = 0;
  std::string style;
};

/// Certifies dissipativity and commutation of both pairs.
Instance instance_from_json(const Json& j, double tol = 1e-10);

using Function = std::variant<ExpSum1D, ExpSum2D>;

Json to_json(const ExpSum1D& f);
Json to_json(const ExpSum2D& f);
Function function_from_json(const Json& j);

Json to_json(const PerturbationReport& r);
Json to_json(const LipschitzReport& r);
Json to_json(const BesovLipschitzReport& r);
Json to_json(const HolderSchattenReport& r);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dissdoi
