#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dissdoi/linalg.hpp"

namespace dissdoi {

/// Finite exponential sum f(z) = sum_j c_j exp(i xi_j z) with 0 <= xi_j <= sigma:
/// the computable stand-in for bounded functions analytic in the upper
/// half-plane whose Fourier transform lives in [0, sigma].
class ExpSum1D {
 public:
  struct Term {
    double freq;
    Complex coeff;
  };

  /// Merges equal frequencies and drops zero coefficients. Throws
  /// InvalidArgument for sigma <= 0 or a frequency outside [0, sigma].
  ExpSum1D(double sigma, std::vector<Term> terms);

  static ExpSum1D constant(Complex c, double sigma = 1.0) { return ExpSum1D(sigma, {{0.0, c}}); }
  static ExpSum1D exponential(double freq, Complex c = 1.0, double sigma = 0.0);

  double sigma() const { return sigma_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// sum |c_j|, a rigorous bound for sup |f| on the closed upper half-plane.
  double coefficient_bound() const;

  /// Unchecked evaluation.
  Complex value(Complex z) const;
  Complex derivative_at(Complex z) const;

  ExpSum1D derivative() const;
  ExpSum1D operator*(const ExpSum1D& other) const;
  ExpSum1D operator+(const ExpSum1D& other) const;
  ExpSum1D scaled(Complex factor) const;
  ExpSum1D with_sigma(double sigma) const { return ExpSum1D(sigma, terms_); }

 private:
  double sigma_;
  std::vector<Term> terms_;
};

/// Two-variable exponential sum with frequencies in the closed first quadrant
/// and |(xi, eta)|_2 <= sigma.
class ExpSum2D {
 public:
  struct Term {
    double xi;
    double eta;
    Complex coeff;
  };

  ExpSum2D(double sigma, std::vector<Term> terms);

  double sigma() const { return sigma_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  double coefficient_bound() const;

  Complex value(Complex x, Complex y) const;

  /// s -> f(s, y) as a one-variable sum (bandwidth sigma).
  ExpSum1D slice_first(Complex y) const;
  /// t -> f(x, t) as a one-variable sum (bandwidth sigma).
  ExpSum1D slice_second(Complex x) const;

  ExpSum2D operator+(const ExpSum2D& other) const;
  ExpSum2D scaled(Complex factor) const;

 private:
  double sigma_;
  std::vector<Term> terms_;
};

/// Checked evaluation: throws LowerHalfPlane if Im z < -tol.
Complex eval(const ExpSum1D& f, Complex z, double tol = 1e-10);
Complex eval(const ExpSum2D& f, Complex x, Complex y, double tol = 1e-10);

struct SupNorm {
  double upper;          // sum |c_j|
  double grid_estimate;  // max |f| over a real grid, <= upper
};

struct SupGrid {
  double half_width = 60.0;
  int points = 6001;  // per axis
};

SupNorm sup_norm(const ExpSum1D& f, const SupGrid& grid = {});
SupNorm sup_norm(const ExpSum2D& f, const SupGrid& grid = {120.0 / 4, 241});

/// max |f'| over the real grid.
double derivative_grid_sup(const ExpSum1D& f, const SupGrid& grid = {});

/// (e^z - 1)/z, accurate near z = 0.
Complex phi1(Complex z);

inline constexpr double kDiagonalSwitch = 1e-6;

/// (f(x) - f(y))/(x - y), f'(x) on the diagonal; term-wise form for
/// |x - y| <= switch_at.
Complex divided_difference(const ExpSum1D& f, Complex x, Complex y,
                           double switch_at = kDiagonalSwitch);

enum class Axis { x, y };

/// Axis x: (f(x1, y2) - f(x2, y2))/(x1 - x2) with points (x1, x2, y2).
/// Axis y: (f(x1, y1) - f(x1, y2))/(y1 - y2) with points (x1, y1, y2).
Complex partial_dd(const ExpSum2D& f, Axis axis, Complex a, Complex b, Complex c);

// Scalar factors of the sampling expansions. Nodes are 2 pi n / sigma.

inline double sampling_node(int n, double sigma) {
  return 2.0 * 3.14159265358979323846 * static_cast<double>(n) / sigma;
}

/// (e^{i sigma y} - 1)/(i(sigma y - 2 pi n)).
Complex sampling_basis(double sigma, int n, Complex y);

/// sigma (f(x) - f(2 pi n/sigma))/(sigma x - 2 pi n).
Complex sampled_difference(const ExpSum1D& f, int n, Complex x);

/// sigma (f(x1, y1) - f(x1, 2 pi n/sigma))/(sigma y1 - 2 pi n).
Complex sampled_difference_second(const ExpSum2D& f, int n, Complex x1, Complex y1);

/// sigma (f(x2, y2) - f(2 pi n/sigma, y2))/(sigma x2 - 2 pi n).
Complex sampled_difference_first(const ExpSum2D& f, int n, Complex x2, Complex y2);

/// q_n(s) of the anchored expansion f(s,t) = f(s,0) + sum q_n(s) r_n(t).
Complex anchor_left(const ExpSum2D& f, int n, Complex s);
/// r_n(t) = t (e^{i sigma t} - 1)/(i(sigma t - 2 pi n)).
Complex anchor_right(double sigma, int n, Complex t);

/// Anchor coefficient q_n as a one-variable exponential sum in s.
ExpSum1D anchor_coefficient(const ExpSum2D& f, int n);

/// Partial sums of sum_{|n| <= N} term(n) at N = n_max, ceil(n_max/2), ...
/// (not below n_start), in increasing order. `extrapolated` removes a
/// c/(N + 1/2) tail using consecutive levels (first entry repeats S_{N_0}).
struct ScalarSeries {
  std::vector<int> levels;
  std::vector<Complex> partial;
  std::vector<Complex> extrapolated;

  Complex best() const { return extrapolated.empty() ? Complex{} : extrapolated.back(); }
};

ScalarSeries symmetric_series(const std::function<Complex(int)>& term, int n_max, int n_start = 16);

/// Plain truncated sum over |n| <= N.
Complex symmetric_sum(const std::function<Complex(int)>& term, int N);

/// sum_n |psi_n(y)|^2 truncated at |n| <= N.
double column_square_sum(double sigma, Complex y, int N);

/// sum_n |f(x) - f(2 pi n/sigma)|^2 / (sigma x - 2 pi n)^2, Richardson-extrapolated.
double row_square_sum(const ExpSum1D& f, double x, int N);

struct LineQuadrature {
  int quad_points = 2048;  // nodes on the initial window, >= 1000
  double tol = 1e-6;
  int max_doublings = 16;
};

/// Integral over the real line of `g`, on [-T, T] with T doubled until
/// Richardson-extrapolated values settle. Throws QuadratureNotConverged.
Complex real_line_integral(const std::function<Complex(double)>& g, double center,
                           double max_frequency, const LineQuadrature& q = {});

/// (sigma/(2 pi)) int |f(x) - f(t)|^2/(x - t)^2 dt.
double row_square_integral(const ExpSum1D& f, double x, const LineQuadrature& q = {});

/// (1/2 pi i) int Delta f(x, t) (e^{i sigma (y - t)} - 1)/(y - t) dt.
Complex kernel_dd_check(const ExpSum1D& f, Complex x, Complex y, const LineQuadrature& q = {});

/// f_eps(z) = f(z)/(1 - i eps z).
class Regularized {
 public:
  Regularized(ExpSum1D f, double eps);
  Complex value(Complex z) const;
  Complex derivative_at(Complex z) const;
  Complex divided_difference(Complex x, Complex y) const;
  const ExpSum1D& base() const { return f_; }
  double eps() const { return eps_; }

 private:
  ExpSum1D f_;
  double eps_;
};

struct RegularizationCheck {
  Regularized function;
  double max_residual;
};

/// Checks Delta f_eps(x,y) = Delta f(x,y)(1 - i eps y)^{-1} + i eps f_eps(x)(1 - i eps y)^{-1}
/// at each (x_k, y_k).
RegularizationCheck regularize_eps(const ExpSum1D& f, double eps, const std::vector<Complex>& xs,
                                   const std::vector<Complex>& ys);

/// Modulus of continuity: power t^alpha, piecewise-linear table, or a callable.
class Modulus {
 public:
  enum class Kind { power, tabulated, custom };

  static Modulus power(double alpha);
  /// Points (t_k, w_k) with t increasing; (0, 0) is prepended when absent.
  /// Beyond the last point w grows like t^tail_exponent.
  static Modulus tabulated(std::vector<std::pair<double, double>> points, double tail_exponent = 0.0);
  static Modulus custom(std::function<double(double)> fn, std::string name);

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const std::string& name() const { return name_; }

  /// Nondecreasing and subadditive on the given grid (with w(0) = 0).
  bool check_on_grid(const std::vector<double>& ts, double tol = 1e-12) const;

 private:
  Kind kind_ = Kind::power;
  double alpha_ = 0.5;
  double tail_exponent_ = 0.0;
  std::vector<std::pair<double, double>> table_;
  std::function<double(double)> fn_;
  std::string name_;

  friend double omega_star(const Modulus&, double);
};

/// s * int_s^inf w(t)/t^2 dt. Closed form for power and tabulated moduli,
/// quadrature for custom ones. Throws DivergentModulus.
double omega_star(const Modulus& w, double s);

/// Always by quadrature (Gauss-Kronrod on dyadic pieces after t = s/u).
double omega_star_quadrature(const Modulus& w, double s);

}  // namespace dissdoi
