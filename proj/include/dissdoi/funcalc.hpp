#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "dissdoi/bandfun.hpp"
#include "dissdoi/dissipative.hpp"
#include "dissdoi/linalg.hpp"

namespace dissdoi {

enum class Route { spectral, taylor_cayley, anchor_series, separated };

std::string_view to_string(Route route);

struct CalculusResult {
  ComplexMatrix value;
  Route route = Route::spectral;
  double residual_estimate = 0.0;
};

enum class RouteChoice { automatic, spectral, taylor_cayley, separated };

struct TaylorOptions {
  double radius = 0.95;                // minimum FFT circle radius
  int points = 4096;                   // minimum FFT length
  double max_cayley_radius = 1 - 1e-3; // spectral radius cap for T
  int max_terms = 400000;
  double tail_tol = 1e-16;
  int bivariate_points = 1024;
  double bivariate_max_radius = 0.9;
};

struct CalculusOptions {
  RouteChoice route = RouteChoice::automatic;
  EigOptions eig{};
  TaylorOptions taylor{};
};

/// f(L) for an exponential sum. Spectral route when L has a well-conditioned
/// eigenbasis, otherwise the power series of f composed with the inverse
/// Cayley map, evaluated at T = cayley(L).
CalculusResult apply_one(const ExpSum1D& f, const DissipativeMatrix& l, const CalculusOptions& opts = {});

struct ExtendedResult {
  ComplexMatrix value;           // (L + iI) f_i(L)
  double commutation_residual;   // |(L + iI) f_i(L) - f_i(L)(L + iI)|
};

/// (L + iI) f_i(L) for a caller-supplied f_i.
ExtendedResult apply_one_extended(const ExpSum1D& f_i, const DissipativeMatrix& l,
                                  const CalculusOptions& opts = {});

/// f(L, M) for a commuting pair: joint eigenbasis when one exists, the
/// product of exponentials otherwise, or the bivariate power series in the
/// Cayley transforms when requested.
CalculusResult apply_pair_commuting(const ExpSum2D& f, const CommutingDissipativePair& p,
                                    const CalculusOptions& opts = {});

/// sum_j c_j e^{i xi_j L} e^{i eta_j M}, no commutation needed.
ComplexMatrix separated_value(const ExpSum2D& f, const DissipativeMatrix& l, const DissipativeMatrix& m,
                              const CalculusOptions& opts = {});

/// Stopping rule for truncated series: checkpoints at N, N/2, N/4, ...
/// (down to n_start), extrapolated under a 1/(N + 1/2) tail model, stop once
/// `stable_checks` successive changes fall below tol * (|value| + |Q|).
struct SeriesOptions {
  int n_start = 16;
  double tol = 1e-8;
  int stable_checks = 3;
  bool extrapolate = true;
  bool early_stop = true;
  bool require_convergence = true;
};

struct NoncommutingResult {
  CalculusResult result;
  ComplexMatrix bounded_product;  // f(L, M)(I - iM)^{-1}
  int n_used = 0;
  bool converged = false;
};

/// f(L, M) for arbitrary L, M through the anchored series
/// f(L,0) + sum_n q_n(L) r_n(M). Throws SeriesNotConverged.
NoncommutingResult apply_pair_noncommuting(const ExpSum2D& f, const DissipativeMatrix& l,
                                           const DissipativeMatrix& m, int n,
                                           const SeriesOptions& series = {},
                                           const CalculusOptions& opts = {});

/// Argument of a factor function: a single matrix or a commuting pair.
class Operand {
 public:
  Operand(DissipativeMatrix m);        // NOLINT(google-explicit-constructor)
  Operand(CommutingDissipativePair p);  // NOLINT(google-explicit-constructor)

  bool is_pair() const { return std::holds_alternative<CommutingDissipativePair>(v_); }
  const DissipativeMatrix& single() const;
  const CommutingDissipativePair& pair() const;
  Eigen::Index dim() const;

 private:
  std::variant<DissipativeMatrix, CommutingDissipativePair> v_;
};

/// Common eigenbasis: basis * diag(first) * inverse = L (and diag(second)
/// for M when the operand is a pair).
struct JointSpectrum {
  ComplexMatrix basis;
  ComplexMatrix inverse;
  std::vector<Complex> first;
  std::vector<Complex> second;
  double condition = 1.0;
};

std::optional<JointSpectrum> diagonalize(const Operand& op, const EigOptions& opts = {});

/// Memoized e^{i xi X} for one matrix.
class ExponentialTable {
 public:
  ExponentialTable(DissipativeMatrix x, CalculusOptions opts = {});
  const ComplexMatrix& at(double freq);
  const DissipativeMatrix& matrix() const { return x_; }

 private:
  DissipativeMatrix x_;
  CalculusOptions opts_;
  std::optional<SpectralData> spectral_;
  std::map<double, ComplexMatrix> cache_;
};

}  // namespace dissdoi
