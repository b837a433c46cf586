#pragma once

#include <cstdint>
#include <random>

#include "dissdoi/linalg.hpp"

namespace dissdoi {

/// Deterministic random source. Values depend only on the seed and the
/// call sequence; the mapping from engine output to doubles is fixed here
/// rather than delegated to the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(seed) ^ mix(stream + 0x9e3779b97f4a7c15ULL)) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi);  // inclusive
  double normal();
  Complex complex_normal();

  ComplexMatrix gaussian(Eigen::Index n);
  /// Haar-like unitary from the QR factorization of a Gaussian matrix.
  ComplexMatrix unitary(Eigen::Index n);

 private:
  static std::uint64_t mix(std::uint64_t x);

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dissdoi
