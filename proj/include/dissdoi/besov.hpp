#pragma once

#include <vector>

#include "dissdoi/bandfun.hpp"

namespace dissdoi {

/// Smooth dyadic window: w = 0 outside (1/2, 2) and sum_n w(t/2^n) = 1.
class WindowW {
 public:
  /// s(u) = B(u)/(B(u) + B(1-u)), B(u) = exp(-1/u) for u > 0.
  static double profile(double u);
  double operator()(double t) const;
};

WindowW build_w();

template <class F>
struct BandDecomposition {
  struct Band {
    int n;
    F f;
  };
  std::vector<Band> bands;
  Complex constant{};  // zero-frequency part, kept out of the bands
};

/// Term coefficients multiplied by w(|freq|_2 / 2^n); each band gets
/// bandwidth 2^{n+1}.
BandDecomposition<ExpSum1D> decompose(const ExpSum1D& f);
BandDecomposition<ExpSum2D> decompose(const ExpSum2D& f);

struct BesovNorm {
  double upper;  // sum_n 2^n (coefficient bound of band n)
  double grid;   // sum_n 2^n (grid sup of band n)
};

BesovNorm besov_norm(const ExpSum1D& f, const SupGrid& grid = {});
BesovNorm besov_norm(const ExpSum2D& f, const SupGrid& grid = {30.0, 121});

}  // namespace dissdoi
