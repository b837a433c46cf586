#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dissdoi/bandfun.hpp"
#include "dissdoi/dissipative.hpp"
#include "dissdoi/doi.hpp"
#include "dissdoi/errors.hpp"
#include "dissdoi/funcalc.hpp"
#include "dissdoi/random.hpp"
#include "dissdoi/sample.hpp"

using namespace dissdoi;
using std::numbers::pi;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Hilbert-Schmidt contraction observations gathered by the perturbation runs.
struct S2Tally {
  int count = 0;
  int violations = 0;
  double worst_margin = -kInf;
  void add(const PerturbationReport& r) {
    ++count;
    const double margin = r.s2_lhs - (r.s2_rhs + 1e-6);
    worst_margin = std::max(worst_margin, margin);
    if (margin > 0.0) ++violations;
  }
};

S2Tally s2_tally;

// (sigma/2pi) int |f(x) - f(t)|^2/(x - t)^2 dt in closed form: with
// a_j = c_j e^{i xi_j x}, int (1 - e^{i a u})(1 - e^{-i b u})/u^2 du = 2 pi min(a, b).
double row_integral_closed_form(const ExpSum1D& f, double x) {
  Complex s{};
  for (const auto& j : f.terms())
    for (const auto& k : f.terms())
      s += j.coeff * std::exp(Complex(0, j.freq * x)) * std::conj(k.coeff * std::exp(Complex(0, k.freq * x))) *
           std::min(j.freq, k.freq);
  return f.sigma() * s.real();
}

Outcome cayley_round_trip() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 200; ++k) {
    const int n = rng.integer(2, 16);
    GenOptions o;
    o.style = static_cast<GenStyle>(k % 3);
    const auto g = gen_pair(static_cast<std::uint64_t>(1000 + k), n, o);
    const auto& l = k % 2 == 0 ? g.first.first() : g.second.second();
    const double err = operator_norm(inverse_cayley(cayley(l)).matrix() - l.matrix());
    const double rel = err / (1.0 + operator_norm(l.matrix()));
    worst = std::max(worst, rel);
    if (rel > 1e-9) ++failures;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 5.0, fmt("worst relative error %.2e, %.0f failures, %.2f s", worst, failures, secs)};
}

Outcome column_identity() {
  Rng rng(202);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double sigma = 0.5 + 3.5 * rng.uniform();
    const double y = rng.uniform(-50.0, 50.0);
    worst = std::max(worst, std::abs(column_square_sum(sigma, y, 100000) - 1.0));
  }
  // sigma y = pi: the terms are 4/(pi^2 (1 - 2n)^2). Oracle: the same partial
  // sum accumulated from the smallest terms upward, and its limit 1.
  const int n = 1000000;
  const double lib = column_square_sum(1.0, pi, n);
  long double direct = 0.0L;
  for (int m = n; m >= 1; --m) {
    const long double a = 2.0L * m - 1.0L, b = 2.0L * m + 1.0L;
    direct += 4.0L / (static_cast<long double>(pi) * pi * a * a) + 4.0L / (static_cast<long double>(pi) * pi * b * b);
  }
  direct += 4.0L / (static_cast<long double>(pi) * pi);
  const double closed = std::abs(lib - 1.0);
  const double vs_direct = std::abs(lib - static_cast<double>(direct));
  return {worst <= 1e-4 && closed <= 1e-6 && vs_direct <= 1e-12,
          fmt("random y worst %.2e; at pi: |S-1| = %.2e, |S-direct| = %.2e", worst, closed, vs_direct)};
}

Outcome row_bound() {
  Rng rng(303);
  double worst_gap = 0.0, worst_ratio = 0.0, worst_exact = 0.0;
  int violations = 0;
  for (int k = 0; k < 100; ++k) {
    const auto f = random_expsum_1d(rng, 0.5 + 3.5 * rng.uniform());
    const double x = rng.uniform(-5.0, 5.0);
    const double sum = row_square_sum(f, x, 20000);
    const double quad = row_square_integral(f, x);
    worst_gap = std::max(worst_gap, std::abs(sum - quad));
    worst_exact = std::max(worst_exact, std::abs(sum - row_integral_closed_form(f, x)));
    // Row sum is sigma^2 times the unscaled quotient sum, hence sigma^2 in the bound.
    const double bound = 4.0 / pi * f.sigma() * f.sigma() * f.coefficient_bound() * f.coefficient_bound();
    worst_ratio = std::max(worst_ratio, sum / bound);
    if (sum > bound) ++violations;
  }
  std::ostringstream os;
  os << "sum vs quadrature worst " << worst_gap << "; sum vs closed form worst " << worst_exact
     << "; max sum/bound " << worst_ratio << "; " << violations << " violations";
  return {worst_gap <= 1e-4 && worst_exact <= 1e-4 && violations == 0, os.str()};
}

Outcome bernstein() {
  Rng rng(404);
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const auto f = random_expsum_1d(rng, 0.25 + 4.0 * rng.uniform(), 6);
    const double lhs = derivative_grid_sup(f);
    const double rhs = f.sigma() * f.coefficient_bound();
    worst = std::max(worst, lhs / rhs);
    if (lhs > rhs) ++violations;
  }
  return {violations == 0, fmt("max ratio %.6f, %.0f violations", worst, violations)};
}

Outcome single_perturbation() {
  const auto t0 = Clock::now();
  Rng rng(505);
  SeriesOptions s;
  s.tol = 1e-7;
  s.require_convergence = false;
  double worst = 0.0;
  int failures = 0, unconverged = 0, max_n = 0, skipped = 0;
  for (int k = 0, seed = 5000; k < 50; ++seed) {
    const int n = rng.integer(2, 8);
    GenOptions o;
    o.style = static_cast<GenStyle>(seed % 3);
    o.spread = 0.05 + 0.2 * rng.uniform();
    const auto g = gen_pair(static_cast<std::uint64_t>(seed), n, o);
    const auto& l = g.first.first();
    const auto& m = g.second.first();
    if (operator_norm(l.matrix() - m.matrix()) > 0.5) {
      ++skipped;
      continue;
    }
    ++k;
    const auto f = random_expsum_1d(rng, 1.0);
    const auto r = perturb_single(f, l, m, 1 << 18, s);
    s2_tally.add(r);
    worst = std::max(worst, r.residual);
    max_n = std::max(max_n, r.doi.n_used);
    if (!r.doi.converged) ++unconverged;
    if (r.residual > 1e-6) ++failures;
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "worst residual " << worst << ", " << failures << " over 1e-6, " << unconverged
     << " without plateau, largest plateau N " << max_n << ", " << skipped << " draws with |L - M| > 0.5 skipped, "
     << secs << " s";
  return {failures == 0 && unconverged == 0 && secs < 60.0, os.str()};
}

Outcome pair_formulas() {
  Rng rng(606);
  SeriesOptions s;
  s.tol = 1e-6;
  s.require_convergence = false;
  s.early_stop = false;
  double worst = 0.0, worst_sum = 0.0;
  int failures = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = rng.integer(2, 6);
    GenOptions o;
    o.style = static_cast<GenStyle>(k % 3);
    const auto g = gen_pair(static_cast<std::uint64_t>(6000 + k), n, o);
    const auto f = random_expsum_2d(rng, 1.0);
    const auto a = perturb_pair(f, g.first, g.second, PairFormula::vary_second, 8000, s);
    const auto b = perturb_pair(f, g.first, g.second, PairFormula::vary_first, 8000, s);
    const auto c = perturb_pair(f, g.first, g.second, PairFormula::combined, 8000, s);
    for (const auto* r : {&a, &b, &c}) {
      s2_tally.add(*r);
      worst = std::max(worst, r->residual);
      if (r->residual > 1e-5) ++failures;
    }
    const double sum_gap = operator_norm(a.doi_value + b.doi_value - c.doi_value);
    worst_sum = std::max(worst_sum, sum_gap / std::max(1.0, operator_norm(c.doi_value)));
  }
  return {failures == 0 && worst_sum <= 1e-13,
          fmt("worst residual %.2e, %.0f over 1e-5, |first + second - combined| relative %.1e", worst, failures, worst_sum)};
}

Outcome lipschitz() {
  Rng rng(707);
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double sigma = std::ldexp(1.0, k % 3);
    GenOptions o;
    o.style = static_cast<GenStyle>(k % 3);
    o.spread = 0.02 + 0.5 * rng.uniform();
    const auto g = gen_pair(static_cast<std::uint64_t>(7000 + k), rng.integer(2, 8), o);
    const auto f = random_expsum_2d(rng, sigma);
    const auto r = lipschitz_certificate(f, g.first, g.second);
    worst = std::max(worst, r.lhs / r.rhs);
    if (!(r.lhs <= r.rhs)) ++violations;
  }
  return {violations == 0, fmt("max lhs/rhs %.4f, %.0f violations", worst, violations)};
}

Outcome besov_bands() {
  Rng rng(808);
  int not_ok = 0;
  double worst_sum = 0.0;
  std::size_t min_bands = 1000;
  for (int k = 0; k < 50; ++k) {
    std::vector<ExpSum2D::Term> terms;
    const double top = 16.0;
    for (double r = 0.6 + 0.3 * rng.uniform(); r <= top; r *= 2.0 + rng.uniform()) {
      const double angle = 0.5 * pi * rng.uniform();
      terms.push_back({r * std::cos(angle), r * std::sin(angle), rng.complex_normal() / r});
    }
    const ExpSum2D f(top, terms);
    const auto g = gen_pair(static_cast<std::uint64_t>(8000 + k), rng.integer(2, 6));
    const auto r = besov_lipschitz(f, g.first, g.second);
    double sum = 0.0;
    for (const auto& b : r.bands) sum += b.contribution;
    worst_sum = std::max(worst_sum, std::abs(sum - r.rhs) / std::max(1.0, r.rhs));
    min_bands = std::min(min_bands, r.bands.size());
    if (!r.ok) ++not_ok;
  }
  return {not_ok == 0 && worst_sum <= 1e-12 && min_bands >= 2,
          fmt("%.0f not ok, band sum gap %.1e, fewest bands %.0f", not_ok, worst_sum, static_cast<double>(min_bands))};
}

Outcome s2_contraction() {
  return {s2_tally.count > 0 && s2_tally.violations == 0,
          fmt("%.0f applications, %.0f violations, worst margin %.2e", s2_tally.count, s2_tally.violations,
              s2_tally.worst_margin)};
}

Outcome route_agreement() {
  Rng rng(909);
  CalculusOptions spectral, taylor;
  spectral.route = RouteChoice::spectral;
  taylor.route = RouteChoice::taylor_cayley;
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 100; ++k) {
    const auto g = gen_pair(static_cast<std::uint64_t>(9000 + k), rng.integer(2, 8));
    const auto& l = g.first.first();
    const auto f = random_expsum_1d(rng, 0.5 + 1.5 * rng.uniform());
    const double d = operator_norm(apply_one(f, l, spectral).value - apply_one(f, l, taylor).value);
    worst = std::max(worst, d);
    if (d > 1e-7) ++failures;
  }
  SeriesOptions s;
  s.tol = 1e-9;
  s.require_convergence = false;
  double worst_nc = 0.0;
  int nc_failures = 0;
  for (int k = 0; k < 20; ++k) {
    GenOptions o;
    o.style = static_cast<GenStyle>(k % 3);
    const auto g = gen_pair(static_cast<std::uint64_t>(9500 + k), rng.integer(2, 6), o);
    const auto f = random_expsum_2d(rng, 1.0);
    const auto nc = apply_pair_noncommuting(f, g.first.first(), g.first.second(), 8000, s);
    const double d = operator_norm(nc.result.value - apply_pair_commuting(f, g.first).value);
    worst_nc = std::max(worst_nc, d);
    if (d > 1e-6) ++nc_failures;
  }
  return {failures == 0 && nc_failures == 0,
          fmt("spectral vs Taylor worst %.2e; anchor series vs commuting worst %.2e; %.0f failures", worst, worst_nc,
              failures + nc_failures)};
}

Outcome omega_closed_forms() {
  double worst = 0.0;
  for (double a : {0.1, 0.25, 0.5, 0.75, 0.9})
    for (double s : {1e-3, 0.1, 1.0, 7.0, 100.0}) {
      const double closed = omega_star(Modulus::power(a), s);
      const double want = std::pow(s, a) / (1.0 - a);
      const double quad = omega_star_quadrature(Modulus::power(a), s);
      worst = std::max({worst, std::abs(closed - want) / want, std::abs(quad - want) / want});
    }
  bool divergent = false, divergent_quad = false;
  try {
    omega_star(Modulus::power(1.0), 1.0);
  } catch (const DivergentModulus&) {
    divergent = true;
  }
  try {
    omega_star_quadrature(Modulus::custom([](double t) { return t; }, "identity"), 1.0);
  } catch (const DivergentModulus&) {
    divergent_quad = true;
  }
  return {worst <= 1e-8 && divergent && divergent_quad,
          fmt("worst relative gap %.2e; linear modulus divergent: closed form %.0f, quadrature %.0f", worst,
              divergent, divergent_quad)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Cayley round trip", cayley_round_trip},
      {2, "column normalization", column_identity},
      {3, "row square-sum bound", row_bound},
      {4, "Bernstein inequality", bernstein},
      {5, "single-operator perturbation formula", single_perturbation},
      {6, "pair perturbation formulas and their sum", pair_formulas},
      {7, "explicit Lipschitz constant", lipschitz},
      {8, "per-band Besov aggregation", besov_bands},
      {9, "S2 contraction", s2_contraction},
      {10, "calculus route agreement", route_agreement},
      {11, "omega_* closed forms", omega_closed_forms},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%d] %s: %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.ok) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
