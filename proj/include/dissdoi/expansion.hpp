#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dissdoi/bandfun.hpp"
#include "dissdoi/funcalc.hpp"

namespace dissdoi {

/// Point at which a factor is evaluated; `y` is unused by one-variable factors.
struct Point {
  Complex x;
  Complex y{};
};

/// Factor value at a fixed matrix argument, indexed by the series index.
class BoundFactor {
 public:
  virtual ~BoundFactor() = default;
  virtual ComplexMatrix at(int n) const = 0;
};

/// Indexed family of scalar functions of one variable or of a pair.
class FactorFamily {
 public:
  virtual ~FactorFamily() = default;
  virtual bool pair_argument() const = 0;
  virtual Complex at(int n, Point p) const = 0;
  /// Matrix values on a concrete operand (closed forms, no eigenbasis needed).
  virtual std::unique_ptr<BoundFactor> bind(const Operand& op, const CalculusOptions& opts) const = 0;
  virtual std::string describe() const = 0;
};

/// Sum over n of left_n (x) right_n, truncated at `truncation`. Sampling-type
/// expansions run over |n| <= N; finite ones over 0 <= n < N.
class HaagerupExpansion {
 public:
  HaagerupExpansion(std::shared_ptr<const FactorFamily> left, std::shared_ptr<const FactorFamily> right,
                    int truncation, bool symmetric, double certificate);

  const FactorFamily& left() const { return *left_; }
  const FactorFamily& right() const { return *right_; }
  int truncation() const { return truncation_; }
  /// Index range |n| <= N (true) or 0 <= n < N (false).
  bool symmetric() const { return symmetric_; }
  /// Row l2 bound times column l2 bound: bounds the induced operator norm.
  double certificate() const { return certificate_; }

  HaagerupExpansion truncated(int n) const;

  /// Indices newly covered when going from level `from` to level `to`.
  std::vector<int> indices(int from, int to) const;

  /// sum_n left_n(a) right_n(b) at truncation N (defaults to the stored one).
  Complex partial_sum(Point a, Point b, int n = -1) const;
  /// Partial sums at N/2 and N combined under a c/(N + 1/2) tail model
  /// (plain partial sum for finite expansions).
  Complex extrapolated_sum(Point a, Point b, int n = -1) const;

 private:
  std::shared_ptr<const FactorFamily> left_;
  std::shared_ptr<const FactorFamily> right_;
  int truncation_;
  bool symmetric_;
  double certificate_;
};

/// (2/sqrt(pi)) sigma sum|c|: the constructive Schur-multiplier constant.
double sampling_certificate(double sigma, double coefficient_bound);

/// phi_n(x) = Delta f(x, 2 pi n/sigma), psi_n(y) = sampling basis.
HaagerupExpansion sampling_expansion_1d(const ExpSum1D& f, int n);

/// Axis y: pair factor b_n on the left, sampling basis on the right.
/// Axis x: sampling basis on the left, pair factor a_n on the right.
HaagerupExpansion sampling_expansion_2d(const ExpSum2D& f, Axis axis, int n);

struct AnchorExpansion {
  ExpSum1D base;              // s -> f(s, 0)
  HaagerupExpansion series;   // q_n (x) r_n
};

AnchorExpansion anchor_expansion(const ExpSum2D& f, int n);

/// Explicit finite list of one-variable factor pairs.
HaagerupExpansion finite_expansion(std::vector<ExpSum1D> left, std::vector<ExpSum1D> right);

}  // namespace dissdoi
