#include <doctest.h>

#include <numbers>
#include <thread>

#include "dissdoi/doi.hpp"
#include "dissdoi/errors.hpp"
#include "dissdoi/expansion.hpp"
#include "dissdoi/random.hpp"
#include "dissdoi/sample.hpp"
#include "oracles.hpp"

using namespace dissdoi;

namespace {

DissipativeMatrix dm(const ComplexMatrix& a) { return DissipativeMatrix::certify(a); }
DissipativeMatrix scalar(Complex z) { return dm(ComplexMatrix::Constant(1, 1, z)); }

DissipativeMatrix random_dissipative(Rng& rng, int n) {
  const ComplexMatrix a = rng.gaussian(n);
  return dm(a + (operator_norm(a) + 0.1) * kI * identity(n));
}

SeriesOptions lenient() {
  SeriesOptions s;
  s.require_convergence = false;
  return s;
}

}  // namespace

TEST_CASE("finite expansions") {
  Rng rng(1);
  const ComplexMatrix q = rng.gaussian(3);
  const auto l = random_dissipative(rng, 3), m = random_dissipative(rng, 3);
  const auto one = finite_expansion({ExpSum1D::constant(1.0)}, {ExpSum1D::constant(1.0)});
  const auto r = doi_apply(one, l, q, m);
  CHECK((r.value - q).norm() < 1e-13);
  CHECK(r.converged);
  CHECK(doi_apply(one, l, ComplexMatrix::Zero(3, 3), m).value.norm() == 0.0);

  // e^{i a x} (x) e^{i b y} gives e^{i a L} Q e^{i b M}.
  const auto x = finite_expansion({ExpSum1D::exponential(0.5), ExpSum1D::exponential(1.0)},
                                  {ExpSum1D::exponential(0.25), ExpSum1D::constant(2.0)});
  const ComplexMatrix want = oracle::exp_i(0.5, l.matrix()) * q * oracle::exp_i(0.25, m.matrix()) +
                             2.0 * oracle::exp_i(1.0, l.matrix()) * q;
  CHECK((doi_apply(x, l, q, m).value - want).norm() < 1e-9);
}

TEST_CASE("scalar arguments reduce to the symbol") {
  const auto f = ExpSum1D::exponential(1.0);
  const auto x = sampling_expansion_1d(f, 4000);
  const ComplexMatrix q = ComplexMatrix::Constant(1, 1, Complex(0.3, -0.1));
  const auto r = doi_apply(x, scalar(kI), q, scalar(2.0 * kI), lenient());
  const Complex symbol = divided_difference(f, kI, 2.0 * kI);
  CHECK(std::abs(r.value(0, 0) - symbol * q(0, 0)) < 1e-7);
}

TEST_CASE("single perturbation formula") {
  const auto f = ExpSum1D::exponential(1.0);
  const auto s = perturb_single(f, scalar(kI), scalar(2.0 * kI), 4000, lenient());
  CHECK(std::abs(s.direct_value(0, 0) - (std::exp(-1.0) - std::exp(-2.0))) < 1e-15);
  CHECK(s.residual < 1e-7);

  Rng rng(77);
  const auto l = random_dissipative(rng, 4);
  const auto same = perturb_single(f, l, l, 100, lenient());
  CHECK(same.doi_value.norm() == 0.0);
  CHECK(same.direct_value.norm() == 0.0);

  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto inst = gen_pair(seed, 6);
    const auto g = random_expsum_1d(rng, 1.0);
    const auto r = perturb_single(g, inst.first.first(), inst.second.first(), 4000, lenient());
    const ComplexMatrix direct = [&] {
      ComplexMatrix out = ComplexMatrix::Zero(6, 6);
      for (const auto& t : g.terms())
        out += t.coeff * (oracle::exp_i(t.freq, inst.first.first().matrix()) -
                          oracle::exp_i(t.freq, inst.second.first().matrix()));
      return out;
    }();
    CHECK((r.direct_value - direct).norm() < 1e-10);
    CHECK(r.residual <= 1e-6);
    CHECK(operator_norm(r.doi_value) <= r.bound + 1e-6);
    CHECK(r.s2_lhs <= r.s2_rhs + 1e-6);
  }
}

TEST_CASE("non-normal operands use the dense path") {
  GenOptions o;
  o.style = GenStyle::nilpotent_shift;
  const auto inst = gen_pair(4, 4, o);
  const auto f = ExpSum1D(1.0, {{0.5, 1.0}, {1.0, Complex(0.2, 0.4)}});
  const auto r = perturb_single(f, inst.first.first(), inst.second.first(), 4000, lenient());
  CHECK(r.doi.path != "schur-multiplier");
  CHECK(r.residual <= 1e-6);
}

TEST_CASE("pair perturbation formulas") {
  Rng rng(5);
  const auto f = random_expsum_2d(rng, 1.0);
  const auto same = gen_pair(3, 4);
  for (auto formula : {PairFormula::vary_second, PairFormula::vary_first, PairFormula::combined}) {
    const auto r = perturb_pair(f, same.first, same.first, formula, 200, lenient());
    CHECK(r.residual == 0.0);
  }
  const auto inst = gen_pair(3, 4);
  SeriesOptions fixed = lenient();
  fixed.early_stop = false;
  const auto a = perturb_pair(f, inst.first, inst.second, PairFormula::vary_second, 4000, fixed);
  const auto b = perturb_pair(f, inst.first, inst.second, PairFormula::vary_first, 4000, fixed);
  const auto c = perturb_pair(f, inst.first, inst.second, PairFormula::combined, 4000, fixed);
  for (const auto* r : {&a, &b, &c}) CHECK(r->residual <= 1e-5);
  CHECK((a.doi_value + b.doi_value - c.doi_value).norm() <= 1e-12 * std::max(1.0, c.doi_value.norm()));
  CHECK((a.direct_value + b.direct_value - c.direct_value).norm() <= 1e-13);
  CHECK(parse_pair_formula("31") == PairFormula::vary_second);
  CHECK(parse_pair_formula("32") == PairFormula::vary_first);
  CHECK(parse_pair_formula("glafor") == PairFormula::combined);
  CHECK_THROWS_AS(parse_pair_formula("33"), InvalidArgument);
}

TEST_CASE("scalar pairs telescope") {
  const ExpSum2D f(std::sqrt(2.0), {{1.0, 1.0, Complex(1, 1)}});
  const auto p1 = check_commuting(scalar(0.5 * kI), scalar(kI));
  const auto p2 = check_commuting(scalar(Complex(0.2, 0.7)), scalar(Complex(-0.3, 0.4)));
  const auto r = perturb_pair(f, p1, p2, PairFormula::combined, 4000, lenient());
  const Complex want = f.value(0.5 * kI, kI) - f.value(Complex(0.2, 0.7), Complex(-0.3, 0.4));
  CHECK(std::abs(r.direct_value(0, 0) - want) < 1e-14);
  CHECK(r.residual < 1e-6);
}

TEST_CASE("Lipschitz certificate") {
  Rng rng(10);
  const auto f = random_expsum_2d(rng, 2.0);
  const auto inst = gen_pair(1, 3);
  const auto same = lipschitz_certificate(f, inst.first, inst.first);
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  CHECK(same.ok);
  // Scalar draws: the certificate dominates |f(l1,m1) - f(l2,m2)|.
  int violations = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto g = random_expsum_2d(rng, 1.0 + 3.0 * rng.uniform());
    auto pick = [&] { return Complex(rng.uniform(-2, 2), rng.uniform(0, 1)); };
    const auto p1 = check_commuting(scalar(pick()), scalar(pick()));
    const auto p2 = check_commuting(scalar(pick()), scalar(pick()));
    const auto r = lipschitz_certificate(g, p1, p2);
    const Complex diff = g.value(p1.first().matrix()(0, 0), p1.second().matrix()(0, 0)) -
                         g.value(p2.first().matrix()(0, 0), p2.second().matrix()(0, 0));
    CHECK(r.lhs == doctest::Approx(std::abs(diff)).epsilon(1e-12));
    const double rhs = 2.0 / std::sqrt(std::numbers::pi) * g.sigma() * g.coefficient_bound() *
                       (std::abs(p1.first().matrix()(0, 0) - p2.first().matrix()(0, 0)) +
                        std::abs(p1.second().matrix()(0, 0) - p2.second().matrix()(0, 0)));
    CHECK(r.rhs == doctest::Approx(rhs).epsilon(1e-12));
    if (!r.ok) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("Besov aggregate bound") {
  const ExpSum2D zero(1.0, {});
  const auto inst = gen_pair(2, 4);
  const auto z = besov_lipschitz(zero, inst.first, inst.second);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.ok);
  const double r8 = 8.0 * std::sqrt(2.0);
  const ExpSum2D two(r8, {{1.0, 1.0, 1.0}, {8.0, 8.0, 1.0}});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = gen_pair(seed, 4);
    const auto r = besov_lipschitz(two, g.first, g.second);
    CHECK(r.ok);
    double sum = 0.0;
    for (const auto& b : r.bands) sum += b.contribution;
    CHECK(sum == doctest::Approx(r.rhs).epsilon(1e-12));
  }
}

TEST_CASE("Hoelder Schatten report") {
  Rng rng(3);
  const auto f = random_expsum_2d(rng, 1.0);
  const auto inst = gen_pair(6, 4);
  const auto same = holder_schatten_report(f, inst.first, inst.first, 0.5, 2.0);
  CHECK(same.lhs_op == 0.0);
  CHECK(same.lhs_sp == 0.0);
  const auto r = holder_schatten_report(f, inst.first, inst.second, 0.5, 2.0);
  CHECK(std::isfinite(r.lhs_sp));
  CHECK(r.lhs_sp >= r.lhs_op * (1 - 1e-12));
  CHECK(std::isfinite(r.ratio_omega));
  CHECK_THROWS_AS(holder_schatten_report(f, inst.first, inst.second, 1.0, 2.0), InvalidExponent);
  CHECK_THROWS_AS(holder_schatten_report(f, inst.first, inst.second, 0.5, 1.0), InvalidExponent);

  // Scalars: halving the perturbation scales the Hoelder quantity by 2^{-alpha}.
  const auto p1 = check_commuting(scalar(kI), scalar(kI));
  const auto p2 = check_commuting(scalar(Complex(0.2, 1.0)), scalar(Complex(0.0, 1.2)));
  const auto p3 = check_commuting(scalar(Complex(0.1, 1.0)), scalar(Complex(0.0, 1.1)));
  const auto full = holder_schatten_report(f, p1, p2, 0.5, 2.0);
  const auto half = holder_schatten_report(f, p1, p3, 0.5, 2.0);
  CHECK(half.holder_quantity == doctest::Approx(full.holder_quantity * std::pow(2.0, -0.5)));
  CHECK(half.ratio_holder <= full.ratio_holder * std::pow(2.0, 0.5) * (1 + 1e-9));
}

TEST_CASE("results do not depend on the calling thread") {
  Rng rng(9);
  const auto f = random_expsum_1d(rng, 1.0);
  const auto inst = gen_pair(9, 5);
  const auto base = perturb_single(f, inst.first.first(), inst.second.first(), 1000, lenient());
  std::vector<ComplexMatrix> out(4);
  std::vector<std::thread> pool;
  for (int k = 0; k < 4; ++k)
    pool.emplace_back([&, k] {
      out[static_cast<std::size_t>(k)] =
          perturb_single(f, inst.first.first(), inst.second.first(), 1000, lenient()).doi_value;
    });
  for (auto& t : pool) t.join();
  for (const auto& v : out) CHECK(v == base.doi_value);
}
