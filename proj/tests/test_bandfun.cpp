#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dissdoi/bandfun.hpp"
#include "dissdoi/errors.hpp"
#include "dissdoi/expansion.hpp"
#include "dissdoi/random.hpp"
#include "dissdoi/sample.hpp"

using namespace dissdoi;
using std::numbers::pi;

namespace {

ExpSum1D e1(double freq) { return ExpSum1D::exponential(freq); }

ExpSum2D e2(double xi, double eta, double sigma = 0.0) {
  return ExpSum2D(sigma > 0.0 ? sigma : std::hypot(xi, eta), {{xi, eta, 1.0}});
}

// Plain difference quotient of a callable.
Complex quotient(const ExpSum1D& f, Complex x, Complex y) { return (f.value(x) - f.value(y)) / (x - y); }

}  // namespace

TEST_CASE("evaluation") {
  for (double s : {0.5, 1.0, 3.0}) CHECK(std::abs(eval(ExpSum1D::exponential(s), kI) - std::exp(-s)) < 1e-15);
  CHECK(std::abs(eval(ExpSum1D::constant(1.0), Complex(2.0, 7.0)) - 1.0) < 1e-15);
  CHECK(std::abs(eval(ExpSum1D(2.0, {{1.0, 1.0}, {2.0, 1.0}}), 0.0) - 2.0) < 1e-15);
  CHECK_THROWS_AS(eval(e1(1.0), Complex(0.0, -0.5)), LowerHalfPlane);
  CHECK_THROWS_AS(ExpSum1D(1.0, {{1.5, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(ExpSum2D(1.0, {{1.0, 1.0, 1.0}}), InvalidArgument);
}

TEST_CASE("sup norm") {
  auto s = sup_norm(e1(1.0));
  CHECK(s.upper == doctest::Approx(1.0));
  CHECK(s.grid_estimate == doctest::Approx(1.0));
  const ExpSum1D cancel(1.0, {{1.0, 1.0}, {1.0, -1.0}});
  CHECK(sup_norm(cancel).upper == 0.0);
  s = sup_norm(ExpSum1D(1.0, {{0.0, 1.0}, {1.0, 1.0}}));
  CHECK(s.upper == doctest::Approx(2.0));
  CHECK(s.grid_estimate == doctest::Approx(2.0));
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto f = random_expsum_1d(rng, 2.0);
    const auto t = sup_norm(f);
    CHECK(t.grid_estimate <= t.upper * (1 + 1e-14));
  }
}

TEST_CASE("phi1 matches (e^z - 1)/z") {
  for (Complex z : {Complex(1e-9, 0), Complex(0.3, -0.2), Complex(0, 0.49), Complex(2, 1), Complex(-5, 3)}) {
    const Complex direct = (std::exp(z) - 1.0) / z;
    CHECK(std::abs(phi1(z) - direct) <= 1e-7 * std::abs(direct));
  }
  CHECK(std::abs(phi1(0.0) - 1.0) == 0.0);
}

TEST_CASE("divided differences") {
  CHECK(std::abs(divided_difference(ExpSum1D::constant(3.0), 0.2, 1.7)) == 0.0);
  const auto f = ExpSum1D(2.0, {{0.5, Complex(1, 2)}, {2.0, -0.7}});
  for (auto [x, y] : {std::pair<Complex, Complex>{0.3, 1.1}, {Complex(-2, 0.5), Complex(1, 0.1)}}) {
    CHECK(std::abs(divided_difference(f, x, y) - quotient(f, x, y)) < 1e-13);
    CHECK(std::abs(divided_difference(f, x, y) - divided_difference(f, y, x)) < 1e-14);
  }
  CHECK(std::abs(divided_difference(f, 0.4, 0.4) - f.derivative_at(0.4)) < 1e-15);
  // Near the diagonal the term-wise form keeps full accuracy.
  const Complex near = divided_difference(f, 0.4, 0.4 + 1e-9);
  const Complex exact = f.derivative_at(0.4 + 0.5e-9);
  CHECK(std::abs(near - exact) < 1e-13);
}

TEST_CASE("partial divided differences") {
  const ExpSum2D g(1.0, {{0.0, 1.0, 1.0}});  // depends on y only
  CHECK(std::abs(partial_dd(g, Axis::x, 0.1, 0.9, 0.3)) == 0.0);
  const auto f = e2(1.0, 1.0);
  const Complex a = 0.2, b = 0.9, c = -0.4;
  const Complex want_x = (f.value(a, c) - f.value(b, c)) / (a - b);
  const Complex want_y = (f.value(a, b) - f.value(a, c)) / (b - c);
  CHECK(std::abs(partial_dd(f, Axis::x, a, b, c) - want_x) < 1e-14);
  CHECK(std::abs(partial_dd(f, Axis::y, a, b, c) - want_y) < 1e-14);
}

TEST_CASE("bernstein inequality on random sums") {
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const auto f = random_expsum_1d(rng, 1.0 + 3.0 * rng.uniform());
    CHECK(derivative_grid_sup(f) <= f.sigma() * f.coefficient_bound() * (1 + 1e-12));
  }
}

TEST_CASE("sampling expansion reproduces the divided difference") {
  const auto f = e1(1.0);
  const auto x = sampling_expansion_1d(f, 2000);
  const Complex want = quotient(f, 0.3, 1.1);
  CHECK(std::abs(x.partial_sum({0.3}, {1.1}) - want) < 1e-4);
  CHECK(std::abs(x.extrapolated_sum({0.3}, {1.1}) - want) < 1e-6);
  CHECK(x.certificate() <= 2.0 / std::sqrt(pi) * 1.0 * 1.0 + 1e-15);
  const auto zero = sampling_expansion_1d(ExpSum1D::constant(2.0), 50);
  CHECK(std::abs(zero.partial_sum({0.3}, {1.1})) == 0.0);
}

TEST_CASE("two-variable sampling expansions") {
  const auto f = e2(1.0, 1.0, 1.5);
  Rng rng(21);
  for (int k = 0; k < 3; ++k) {
    const double x1 = rng.uniform(-2, 2), y1 = rng.uniform(-2, 2), x2 = rng.uniform(-2, 2), y2 = rng.uniform(-2, 2);
    // axis y: Delta_y f(x1; y1, y2) with left factor at (x1, y1), right at y2.
    const auto ey = sampling_expansion_2d(f, Axis::y, 2000);
    const Complex dy = partial_dd(f, Axis::y, x1, y1, y2);
    CHECK(std::abs(ey.extrapolated_sum({x1, y1}, {y2}) - dy) < 1e-6);
    // axis x: Delta_x f(x1, x2; y2) with left factor at x1, right at (x2, y2).
    const auto ex = sampling_expansion_2d(f, Axis::x, 2000);
    const Complex dx = partial_dd(f, Axis::x, x1, x2, y2);
    CHECK(std::abs(ex.extrapolated_sum({x1}, {x2, y2}) - dx) < 1e-6);
  }
}

TEST_CASE("anchor expansion") {
  const auto f = e2(1.0, 1.0, 1.5);
  const auto a = anchor_expansion(f, 2000);
  const Complex s = 0.2, t = 0.7;
  const Complex got = a.base.value(s) + a.series.extrapolated_sum({s}, {t});
  CHECK(std::abs(got - f.value(s, t)) < 1e-6);
  CHECK(std::abs(a.series.partial_sum({s}, {0.0})) == 0.0);
  const ExpSum2D only_s(1.0, {{1.0, 0.0, 2.0}});
  const auto b = anchor_expansion(only_s, 100);
  CHECK(std::abs(b.base.value(0.4) - only_s.value(0.4, 0.0)) < 1e-15);
  CHECK(std::abs(b.series.partial_sum({0.4}, {0.9})) == 0.0);
}

TEST_CASE("column and row sums") {
  Rng rng(3);
  for (int k = 0; k < 5; ++k) {
    const double y = rng.uniform(-10, 10);
    CHECK(std::abs(column_square_sum(1.0, y, 100000) - 1.0) <= 1e-4);
  }
  // At sigma y = pi: sum_n 4/(pi^2 (1 - 2n)^2) = 1; truncation tail ~ 2/(pi^2 N).
  const int n = 1000;
  const double s = column_square_sum(1.0, pi, n);
  double direct = 0.0;
  for (int m = -n; m <= n; ++m) direct += 4.0 / (pi * pi * (1.0 - 2.0 * m) * (1.0 - 2.0 * m));
  CHECK(s == doctest::Approx(direct).epsilon(1e-13));
  CHECK(std::abs(s - 1.0) < 1e-3);

  const auto f = ExpSum1D(1.0, {{0.3, 1.0}, {1.0, Complex(0, -0.5)}});
  const double row = row_square_sum(f, 0.7, 4000);
  CHECK(std::abs(row - row_square_integral(f, 0.7)) < 1e-4);
  // Closed form: sigma sum_jk a_j conj(a_k) min(xi_j, xi_k), a_j = c_j e^{i xi_j x}.
  Complex exact{};
  for (const auto& j : f.terms())
    for (const auto& k : f.terms())
      exact += j.coeff * std::exp(Complex(0, 0.7 * j.freq)) * std::conj(k.coeff * std::exp(Complex(0, 0.7 * k.freq))) *
               std::min(j.freq, k.freq);
  CHECK(std::abs(row_square_integral(f, 0.7) - f.sigma() * exact.real()) < 1e-5);
  CHECK(row <= 4.0 / pi * f.coefficient_bound() * f.coefficient_bound());
}

TEST_CASE("kernel reproduction") {
  const auto f = e1(1.0);
  CHECK(std::abs(kernel_dd_check(f, 0.0, 0.0) - kI) < 1e-4);
  CHECK(std::abs(kernel_dd_check(ExpSum1D::constant(1.0), 0.3, 0.2)) < 1e-12);
  Rng rng(5);
  const auto g = random_expsum_1d(rng, 1.0);
  for (int k = 0; k < 5; ++k) {
    const double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3);
    CHECK(std::abs(kernel_dd_check(g, x, y) - divided_difference(g, x, y)) < 1e-4);
  }
  LineQuadrature coarse;
  coarse.quad_points = 100;
  CHECK_THROWS_AS(kernel_dd_check(f, 0.0, 0.0, coarse), InvalidArgument);
}

TEST_CASE("real line integral") {
  // int e^{-x^2} = sqrt(pi); 1/(1+x^2) = pi.
  const Complex gauss = real_line_integral([](double x) { return Complex(std::exp(-x * x)); }, 0.0, 1.0);
  CHECK(std::abs(gauss - std::sqrt(pi)) < 1e-7);
  const Complex lorentz = real_line_integral([](double x) { return Complex(1.0 / (1.0 + x * x)); }, 0.0, 1.0);
  CHECK(std::abs(lorentz - pi) < 1e-6);
}

TEST_CASE("regularization identity") {
  const auto f = e1(1.0);
  Rng rng(12);
  std::vector<Complex> xs, ys;
  for (int k = 0; k < 10000; ++k) {
    xs.emplace_back(rng.uniform(-20, 20), 0.0);
    ys.emplace_back(rng.uniform(-20, 20), 0.0);
  }
  CHECK(regularize_eps(f, 0.1, xs, ys).max_residual <= 1e-10);
  CHECK(regularize_eps(f, 0.3, {0.5, -1.0}, {0.5, -1.0}).max_residual <= 1e-10);
  const auto c = regularize_eps(ExpSum1D::constant(2.0), 0.2, {0.1, 3.0}, {0.7, -2.0});
  CHECK(c.max_residual <= 1e-14);
  const Complex z(0.4, 0.3);
  CHECK(std::abs(c.function.value(z) - 2.0 / (1.0 - kI * 0.2 * z)) < 1e-15);
}

TEST_CASE("modulus and its star transform") {
  CHECK(omega_star(Modulus::power(0.5), 4.0) == doctest::Approx(4.0));
  CHECK(omega_star(Modulus::power(0.3), 1.0) == doctest::Approx(1.0 / 0.7));
  CHECK_THROWS_AS(omega_star(Modulus::power(1.0), 1.0), DivergentModulus);
  CHECK_THROWS_AS(omega_star_quadrature(Modulus::custom([](double t) { return t; }, "linear"), 1.0),
                  DivergentModulus);
  for (double a : {0.2, 0.5, 0.8})
    for (double s : {0.01, 1.0, 50.0})
      CHECK(std::abs(omega_star_quadrature(Modulus::power(a), s) - omega_star(Modulus::power(a), s)) <=
            1e-8 * omega_star(Modulus::power(a), s));
  // min(t, 1): s int_s^1 dt/t + s int_1^inf dt/t^2 = s(1 - ln s) for s < 1.
  const auto capped = Modulus::tabulated({{1.0, 1.0}}, 0.0);
  for (double s : {0.1, 0.5, 2.0}) {
    const double want = s < 1.0 ? s * (1.0 - std::log(s)) : 1.0;
    CHECK(omega_star(capped, s) == doctest::Approx(want).epsilon(1e-12));
    CHECK(omega_star_quadrature(capped, s) == doctest::Approx(want).epsilon(1e-8));
  }
  std::vector<double> grid;
  for (int k = 1; k <= 50; ++k) grid.push_back(0.1 * k);
  CHECK(Modulus::power(0.5).check_on_grid(grid));
  CHECK_FALSE(Modulus::custom([](double t) { return t * t; }, "square").check_on_grid(grid));
  CHECK_THROWS_AS(Modulus::power(1.5), InvalidArgument);
}
