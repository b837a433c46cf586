#include "dissdoi/dissipative.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dissdoi/errors.hpp"
#include "dissdoi/random.hpp"

namespace dissdoi {

DissipativityCheck is_dissipative(const ComplexMatrix& a, double tol) {
  require_valid(a);
  const ComplexMatrix im = (a - a.adjoint()) / (2.0 * kI);
  // Symmetrize away rounding so the Hermitian solver sees an exact Hermitian input.
  const ComplexMatrix herm = 0.5 * (im + im.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  const double margin = es.eigenvalues().minCoeff();
  return {margin, margin >= -tol};
}

DissipativeMatrix DissipativeMatrix::certify(ComplexMatrix a, double tol) {
  const auto check = is_dissipative(a, tol);
  if (!check.dissipative) {
    std::ostringstream os;
    os << "imaginary part has eigenvalue " << check.certified_margin << " below -" << tol;
    throw NotDissipative(os.str());
  }
  return DissipativeMatrix(std::move(a), check.certified_margin);
}

namespace {

ComplexMatrix plus_i_inverse(const ComplexMatrix& x) {
  const auto n = x.rows();
  return solve(x + kI * identity(n), identity(n));
}

double relative(double residual, double a, double b) {
  const double scale = a * b;
  return scale > 0.0 ? residual / scale : residual;
}

}  // namespace

CommutationResiduals commutation_residuals(const DissipativeMatrix& l, const DissipativeMatrix& m) {
  if (l.dim() != m.dim()) throw InvalidArgument("commutation check: dimension mismatch");
  const ComplexMatrix& a = l.matrix();
  const ComplexMatrix& b = m.matrix();

  CommutationResiduals out{};
  out.commutator = relative(operator_norm(commutator(a, b)), operator_norm(a), operator_norm(b));

  const ComplexMatrix ra = plus_i_inverse(a);
  const ComplexMatrix rb = plus_i_inverse(b);
  out.resolvent = relative(operator_norm(commutator(ra, rb)), operator_norm(ra), operator_norm(rb));

  const ComplexMatrix ta = cayley(l);
  const ComplexMatrix tb = cayley(m);
  out.cayley = relative(operator_norm(commutator(ta, tb)), operator_norm(ta), operator_norm(tb));
  return out;
}

CommutingDissipativePair check_commuting(const DissipativeMatrix& l, const DissipativeMatrix& m,
                                         double tol) {
  const auto r = commutation_residuals(l, m);
  if (r.commutator > tol || r.resolvent > tol || r.cayley > tol) {
    std::ostringstream os;
    os << "relative residuals: commutator " << r.commutator << ", resolvent " << r.resolvent
       << ", cayley " << r.cayley << " (tol " << tol << ")";
    throw NotCommuting(os.str());
  }
  const double absolute = operator_norm(commutator(l.matrix(), m.matrix()));
  return CommutingDissipativePair(l, m, absolute, r.resolvent, r.cayley);
}

ComplexMatrix cayley(const DissipativeMatrix& l, const CayleyOptions& opts) {
  const ComplexMatrix& a = l.matrix();
  const auto n = a.rows();
  const ComplexMatrix shifted = a + kI * identity(n);
  const double cond = condition_number(shifted);
  if (!(cond <= opts.condition_cap)) {
    std::ostringstream os;
    os << "L + iI has condition " << cond;
    throw NearSingularShift(os.str());
  }
  // (L - iI)(L + iI)^{-1}: both factors are functions of L and commute, so
  // solve with the transpose system to get the right-multiplication.
  const ComplexMatrix minus = a - kI * identity(n);
  const ComplexMatrix t = solve(shifted.transpose(), minus.transpose()).transpose();
  return t;
}

DissipativeMatrix inverse_cayley(const ComplexMatrix& t, const CayleyOptions& opts) {
  require_valid(t, "Cayley transform");
  const double nrm = operator_norm(t);
  if (nrm > 1.0 + opts.tol) {
    std::ostringstream os;
    os << "not a contraction: |T| = " << nrm;
    throw InvalidArgument(os.str());
  }
  const auto n = t.rows();
  const ComplexMatrix gap = identity(n) - t;
  const double cond = condition_number(gap);
  if (!(cond <= opts.condition_cap)) {
    std::ostringstream os;
    os << "I - T has condition " << cond << "; 1 is numerically an eigenvalue of T";
    throw UnitEigenvalueAtOne(os.str());
  }
  const ComplexMatrix plus = identity(n) + t;
  ComplexMatrix l = kI * solve(gap.transpose(), plus.transpose()).transpose();
  const double scale = std::max(1.0, operator_norm(l));
  return DissipativeMatrix::certify(std::move(l), opts.tol * scale + 1e-12 * cond * scale);
}

ComplexMatrix shifted_resolvent(const DissipativeMatrix& x) {
  const auto n = x.dim();
  return solve(identity(n) - kI * x.matrix(), identity(n));
}

double resolvent_identity_check(const DissipativeMatrix& l, const DissipativeMatrix& m) {
  if (l.dim() != m.dim()) throw InvalidArgument("resolvent identity: dimension mismatch");
  const ComplexMatrix rl = shifted_resolvent(l);
  const ComplexMatrix rm = shifted_resolvent(m);
  const ComplexMatrix iota_l = l.matrix() * rl;
  const ComplexMatrix iota_m = m.matrix() * rm;
  const ComplexMatrix rhs = rl * (l.matrix() - m.matrix()) * rm;
  return operator_norm(iota_l - iota_m - rhs);
}

std::string_view to_string(GenStyle style) {
  switch (style) {
    case GenStyle::normal:
      return "normal";
    case GenStyle::nilpotent_shift:
      return "nilpotent-shift";
    case GenStyle::polynomial:
      return "polynomial";
  }
  return "normal";
}

GenStyle parse_gen_style(std::string_view name) {
  if (name == "normal") return GenStyle::normal;
  if (name == "nilpotent-shift") return GenStyle::nilpotent_shift;
  if (name == "polynomial") return GenStyle::polynomial;
  throw InvalidArgument("unknown generator style '" + std::string(name) + "'");
}

namespace {

struct Sources {
  ComplexMatrix a;
  ComplexMatrix b;
};

DissipativeMatrix lift(const ComplexMatrix& a, double offset) {
  // c >= |A| makes Im(A) + cI positive semidefinite; the small relative
  // bump absorbs rounding in the norm itself.
  const double c = operator_norm(a) * (1.0 + 1e-12) + offset;
  return DissipativeMatrix::certify(a + kI * c * identity(a.rows()), 0.0);
}

Sources normal_sources(Rng& rng, int dim, double scale, const ComplexMatrix& u) {
  ComplexVector a(dim), b(dim);
  for (int k = 0; k < dim; ++k) a(k) = scale * rng.complex_normal();
  for (int k = 0; k < dim; ++k) b(k) = scale * rng.complex_normal();
  return {u * a.asDiagonal() * u.adjoint(), u * b.asDiagonal() * u.adjoint()};
}

ComplexMatrix polynomial(const ComplexMatrix& s, const Complex (&coeffs)[4]) {
  const auto n = s.rows();
  ComplexMatrix out = coeffs[0] * identity(n);
  ComplexMatrix power = identity(n);
  for (int k = 1; k < 4; ++k) {
    power = power * s;
    out += coeffs[k] * power;
  }
  return out;
}

}  // namespace

GeneratedInstance gen_pair(std::uint64_t seed, int dim, const GenOptions& opts) {
  if (dim < 1 || dim > 64) throw InvalidArgument("gen_pair: dim must be in [1, 64]");
  if (!(opts.spread >= 0.0) || !(opts.offset >= 0.0) || !(opts.scale > 0.0))
    throw InvalidArgument("gen_pair: spread/offset must be >= 0 and scale > 0");
  Rng rng(seed, static_cast<std::uint64_t>(opts.style));
  const double root = std::sqrt(static_cast<double>(dim));

  Sources s1, s2;
  switch (opts.style) {
    case GenStyle::normal: {
      const ComplexMatrix u = rng.unitary(dim);
      Rng shared = rng;  // the second pair reuses the spectrum draws, then perturbs them
      s1 = normal_sources(rng, dim, opts.scale, u);
      const ComplexMatrix g = rng.gaussian(dim);
      Eigen::HouseholderQR<ComplexMatrix> qr(u + opts.spread * g / root);
      ComplexMatrix u2 = qr.householderQ() * identity(dim);
      const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (int j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0.0) u2.col(j) *= d / std::abs(d);
      }
      s2 = normal_sources(shared, dim, opts.scale, u2);
      ComplexVector da(dim), db(dim);
      for (int k = 0; k < dim; ++k) da(k) = opts.spread * rng.complex_normal();
      for (int k = 0; k < dim; ++k) db(k) = opts.spread * rng.complex_normal();
      s2.a += u2 * da.asDiagonal() * u2.adjoint();
      s2.b += u2 * db.asDiagonal() * u2.adjoint();
      break;
    }
    case GenStyle::polynomial:
    case GenStyle::nilpotent_shift: {
      ComplexMatrix src;
      ComplexMatrix bump;
      if (opts.style == GenStyle::polynomial) {
        src = opts.scale * rng.gaussian(dim) / root;
        bump = rng.gaussian(dim) / root;
      } else {
        src = ComplexMatrix::Zero(dim, dim);
        bump = ComplexMatrix::Zero(dim, dim);
        for (int k = 0; k + 1 < dim; ++k) src(k, k + 1) = opts.scale * rng.uniform(0.5, 1.5);
        for (int k = 0; k + 1 < dim; ++k) bump(k, k + 1) = rng.uniform(-1.0, 1.0);
      }
      Complex ca[4], cb[4];
      for (auto& c : ca) c = rng.complex_normal();
      for (auto& c : cb) c = rng.complex_normal();
      if (opts.style == GenStyle::nilpotent_shift) ca[1] = Complex(1.0, 0.0) + 0.5 * ca[1];
      s1 = {polynomial(src, ca), polynomial(src, cb)};
      const ComplexMatrix src2 = src + opts.spread * bump;
      Complex ca2[4], cb2[4];
      for (int k = 0; k < 4; ++k) ca2[k] = ca[k] + opts.spread * rng.complex_normal();
      for (int k = 0; k < 4; ++k) cb2[k] = cb[k] + opts.spread * rng.complex_normal();
      s2 = {polynomial(src2, ca2), polynomial(src2, cb2)};
      break;
    }
  }

  auto make_pair = [&](const Sources& s) {
    // Exact commutation holds in exact arithmetic; the tolerance only
    // absorbs rounding in the construction.
    return check_commuting(lift(s.a, opts.offset), lift(s.b, opts.offset), 1e-10);
  };
  return GeneratedInstance{make_pair(s1), make_pair(s2), seed, opts.style};
}

}  // namespace dissdoi
