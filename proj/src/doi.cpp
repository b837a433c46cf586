#include "dissdoi/doi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dissdoi/besov.hpp"
#include "dissdoi/errors.hpp"

namespace dissdoi {

namespace {

/// Checkpoints N, ceil(N/2), ceil(N/4), ... >= n_start, in increasing order.
std::vector<int> schedule(const HaagerupExpansion& x, const SeriesOptions& s) {
  const int n = x.truncation();
  if (!x.symmetric()) return {n};
  std::vector<int> levels{n};
  for (int level = n; level > s.n_start;) {
    level = (level + 1) / 2;
    if (level < s.n_start) break;
    levels.push_back(level);
  }
  std::reverse(levels.begin(), levels.end());
  return levels;
}

/// Accumulates sum_n left_n Q right_n for one component.
class Accumulator {
 public:
  Accumulator(const DoiComponent& c, const CalculusOptions& opts) : c_(c) {
    if (c.left.is_pair() != c.expansion.left().pair_argument() ||
        c.right.is_pair() != c.expansion.right().pair_argument())
      throw InvalidArgument("factor kinds do not match the argument kinds");
    const auto n = c.left.dim();
    if (c.right.dim() != n || c.q.rows() != n || c.q.cols() != n)
      throw InvalidArgument("double operator integral: dimension mismatch");
    left_spec_ = diagonalize(c.left, opts.eig);
    right_spec_ = left_spec_ ? diagonalize(c.right, opts.eig) : std::nullopt;
    if (left_spec_ && right_spec_) {
      schur_ = true;
      q_tilde_ = left_spec_->inverse * c.q * right_spec_->basis;
      kernel_ = ComplexMatrix::Zero(n, n);
      for (std::size_t i = 0; i < left_spec_->first.size(); ++i)
        left_pts_.push_back({left_spec_->first[i], left_spec_->second.empty() ? Complex{} : left_spec_->second[i]});
      for (std::size_t k = 0; k < right_spec_->first.size(); ++k)
        right_pts_.push_back(
            {right_spec_->first[k], right_spec_->second.empty() ? Complex{} : right_spec_->second[k]});
      lv_.resize(left_pts_.size());
      rv_.resize(right_pts_.size());
    } else {
      left_bound_ = c.expansion.left().bind(c.left, opts);
      right_bound_ = c.expansion.right().bind(c.right, opts);
      sum_ = ComplexMatrix::Zero(n, n);
    }
  }

  bool schur() const { return schur_; }

  void add(int index) {
    if (schur_) {
      for (std::size_t i = 0; i < left_pts_.size(); ++i) lv_[i] = c_.expansion.left().at(index, left_pts_[i]);
      for (std::size_t k = 0; k < right_pts_.size(); ++k) rv_[k] = c_.expansion.right().at(index, right_pts_[k]);
      for (std::size_t k = 0; k < rv_.size(); ++k)
        for (std::size_t i = 0; i < lv_.size(); ++i)
          kernel_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) += lv_[i] * rv_[k];
    } else {
      sum_ += left_bound_->at(index) * c_.q * right_bound_->at(index);
    }
  }

  ComplexMatrix value() const {
    if (!schur_) return sum_;
    return left_spec_->basis * kernel_.cwiseProduct(q_tilde_) * right_spec_->inverse;
  }

 private:
  const DoiComponent& c_;
  bool schur_ = false;
  std::optional<JointSpectrum> left_spec_;
  std::optional<JointSpectrum> right_spec_;
  ComplexMatrix q_tilde_;
  ComplexMatrix kernel_;
  std::vector<Point> left_pts_;
  std::vector<Point> right_pts_;
  std::vector<Complex> lv_;
  std::vector<Complex> rv_;
  std::unique_ptr<BoundFactor> left_bound_;
  std::unique_ptr<BoundFactor> right_bound_;
  ComplexMatrix sum_;
};

}  // namespace

DoiResult doi_apply_sum(const std::vector<DoiComponent>& parts, const SeriesOptions& series,
                        const CalculusOptions& opts) {
  if (parts.empty()) throw InvalidArgument("double operator integral needs at least one component");
  const HaagerupExpansion& lead = parts.front().expansion;
  for (const auto& p : parts)
    if (p.expansion.truncation() != lead.truncation() || p.expansion.symmetric() != lead.symmetric())
      throw InvalidArgument("components must share one truncation schedule");
  if (series.n_start < 1 || series.stable_checks < 1) throw InvalidArgument("invalid series options");

  std::vector<std::unique_ptr<Accumulator>> acc;
  int schur = 0;
  double q_scale = 0.0;
  for (const auto& p : parts) {
    acc.push_back(std::make_unique<Accumulator>(p, opts));
    schur += acc.back()->schur() ? 1 : 0;
    q_scale += operator_norm(p.q);
  }

  DoiResult out;
  out.path = schur == static_cast<int>(parts.size()) ? "schur-multiplier" : (schur == 0 ? "dense" : "mixed");
  const std::vector<int> levels = schedule(lead, series);
  const bool extrapolate = series.extrapolate && lead.symmetric();

  std::vector<ComplexMatrix> prev_raw(parts.size());
  std::vector<ComplexMatrix> best(parts.size());
  ComplexMatrix prev_total;
  int covered = -1;
  int quiet = 0;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const int level = levels[li];
    const auto idx = lead.indices(covered, level);
    for (std::size_t c = 0; c < parts.size(); ++c)
      for (int k : idx) acc[c]->add(k);

    ComplexMatrix total = ComplexMatrix::Zero(parts.front().q.rows(), parts.front().q.cols());
    for (std::size_t c = 0; c < parts.size(); ++c) {
      const ComplexMatrix raw = acc[c]->value();
      if (extrapolate && li > 0) {
        // Tail of the sampling series behaves like a/(N + 1/2).
        const double a1 = levels[li] + 0.5;
        const double a0 = levels[li - 1] + 0.5;
        best[c] = (a1 * raw - a0 * prev_raw[c]) / (a1 - a0);
      } else {
        best[c] = raw;
      }
      prev_raw[c] = raw;
      total += best[c];
    }

    HistoryEntry h{level, operator_norm(total), -1.0};
    if (li > 0) {
      h.change = operator_norm(total - prev_total);
      const double threshold = series.tol * (h.norm + q_scale);
      quiet = h.change <= threshold ? quiet + 1 : 0;
    }
    out.history.push_back(h);
    prev_total = total;
    covered = level;
    out.n_used = level;
    out.value = total;
    out.components = best;
    out.converged = !lead.symmetric() || quiet >= series.stable_checks;
    if (out.converged && series.early_stop) break;
  }

  if (!out.converged && series.require_convergence) {
    std::ostringstream os;
    os << "no plateau up to N = " << out.n_used;
    if (!out.history.empty() && out.history.back().change >= 0.0)
      os << " (last change " << out.history.back().change << ")";
    throw SeriesNotConverged(os.str());
  }
  return out;
}

DoiResult doi_apply(const HaagerupExpansion& x, const Operand& left, const ComplexMatrix& q, const Operand& right,
                    const SeriesOptions& series, const CalculusOptions& opts) {
  return doi_apply_sum({DoiComponent{x, left, q, right}}, series, opts);
}

NoncommutingResult apply_pair_noncommuting(const ExpSum2D& f, const DissipativeMatrix& l, const DissipativeMatrix& m,
                                           int n, const SeriesOptions& series, const CalculusOptions& opts) {
  if (l.dim() != m.dim()) throw InvalidArgument("operands differ in dimension");
  const AnchorExpansion anchor = anchor_expansion(f, n);
  const auto dim = l.dim();
  NoncommutingResult out;
  const ComplexMatrix base = apply_one(anchor.base, l, opts).value;
  if (f.terms().empty() || std::all_of(f.terms().begin(), f.terms().end(), [](const auto& t) { return t.eta == 0.0; })) {
    out.result = {base, Route::anchor_series, 0.0};
    out.converged = true;
  } else {
    // The anchored terms carry r_n(M) = M psi_n(M), so the plateau is judged
    // against |M| as the reference size.
    const DoiResult d = doi_apply(anchor.series, Operand(l), identity(dim), Operand(m), series, opts);
    const double est = d.history.size() > 1 ? d.history.back().change : 0.0;
    out.result = {base + d.value, Route::anchor_series, std::max(est, 0.0)};
    out.n_used = d.n_used;
    out.converged = d.converged;
  }
  const ComplexMatrix shift = identity(dim) - kI * m.matrix();
  out.bounded_product = solve(shift.transpose(), out.result.value.transpose()).transpose();
  return out;
}

namespace {

double hs_norm(const ComplexMatrix& a) { return a.norm(); }

PerturbationReport finish(std::string name, DoiResult d, ComplexMatrix direct, const std::vector<DoiComponent>& parts,
                          double sigma, double upper) {
  PerturbationReport r;
  r.formula = std::move(name);
  r.doi_value = d.value;
  r.direct_value = std::move(direct);
  r.residual = operator_norm(r.doi_value - r.direct_value);
  for (const auto& p : parts) {
    r.certificate = std::max(r.certificate, p.expansion.certificate());
    r.bound += p.expansion.certificate() * operator_norm(p.q);
    r.s2_rhs += sigma * upper * hs_norm(p.q);
  }
  r.s2_lhs = hs_norm(r.doi_value);
  r.doi = std::move(d);
  return r;
}

}  // namespace

PerturbationReport perturb_single(const ExpSum1D& f, const DissipativeMatrix& l, const DissipativeMatrix& m, int n,
                                  const SeriesOptions& series, const CalculusOptions& opts) {
  if (l.dim() != m.dim()) throw InvalidArgument("operands differ in dimension");
  std::vector<DoiComponent> parts{{sampling_expansion_1d(f, n), Operand(l), l.matrix() - m.matrix(), Operand(m)}};
  DoiResult d = doi_apply_sum(parts, series, opts);
  ComplexMatrix direct = apply_one(f, l, opts).value - apply_one(f, m, opts).value;
  return finish("single", std::move(d), std::move(direct), parts, f.sigma(), f.coefficient_bound());
}

std::string_view to_string(PairFormula f) {
  switch (f) {
    case PairFormula::vary_second:
      return "31";
    case PairFormula::vary_first:
      return "32";
    case PairFormula::combined:
      return "glafor";
  }
  return "glafor";
}

PairFormula parse_pair_formula(std::string_view name) {
  if (name == "31") return PairFormula::vary_second;
  if (name == "32") return PairFormula::vary_first;
  if (name == "glafor") return PairFormula::combined;
  throw InvalidArgument("unknown formula '" + std::string(name) + "' (expected 31, 32 or glafor)");
}

namespace {

/// f(L1, M2): commuting calculus when the two happen to commute, the anchored
/// series otherwise.
ComplexMatrix mixed_value(const ExpSum2D& f, const DissipativeMatrix& l1, const DissipativeMatrix& m2, int n,
                          const SeriesOptions& series, const CalculusOptions& opts) {
  const auto r = commutation_residuals(l1, m2);
  constexpr double kCommuting = 1e-12;
  if (r.commutator <= kCommuting && r.resolvent <= kCommuting && r.cayley <= kCommuting)
    return apply_pair_commuting(f, check_commuting(l1, m2, kCommuting), opts).value;
  SeriesOptions mixed = series;
  mixed.tol = std::min(series.tol, 1e-9);
  return apply_pair_noncommuting(f, l1, m2, n, mixed, opts).result.value;
}

}  // namespace

PerturbationReport perturb_pair(const ExpSum2D& f, const CommutingDissipativePair& p1,
                                const CommutingDissipativePair& p2, PairFormula formula, int n,
                                const SeriesOptions& series, const CalculusOptions& opts) {
  if (p1.dim() != p2.dim()) throw InvalidArgument("pairs differ in dimension");
  const auto& l1 = p1.first();
  const auto& m1 = p1.second();
  const auto& l2 = p2.first();
  const auto& m2 = p2.second();

  std::vector<DoiComponent> parts;
  if (formula != PairFormula::vary_first)
    parts.push_back({sampling_expansion_2d(f, Axis::y, n), Operand(p1), m1.matrix() - m2.matrix(), Operand(m2)});
  if (formula != PairFormula::vary_second)
    parts.push_back({sampling_expansion_2d(f, Axis::x, n), Operand(l1), l1.matrix() - l2.matrix(), Operand(p2)});
  DoiResult d = doi_apply_sum(parts, series, opts);

  ComplexMatrix direct;
  if (formula == PairFormula::combined) {
    direct = apply_pair_commuting(f, p1, opts).value - apply_pair_commuting(f, p2, opts).value;
  } else {
    const ComplexMatrix middle = mixed_value(f, l1, m2, n, series, opts);
    direct = formula == PairFormula::vary_second ? ComplexMatrix(apply_pair_commuting(f, p1, opts).value - middle)
                                                 : ComplexMatrix(middle - apply_pair_commuting(f, p2, opts).value);
  }
  return finish(std::string(to_string(formula)), std::move(d), std::move(direct), parts, f.sigma(),
                f.coefficient_bound());
}

LipschitzReport lipschitz_certificate(const ExpSum2D& f, const CommutingDissipativePair& p1,
                                      const CommutingDissipativePair& p2, double tol, const CalculusOptions& opts) {
  if (p1.dim() != p2.dim()) throw InvalidArgument("pairs differ in dimension");
  LipschitzReport r;
  r.lhs = operator_norm(apply_pair_commuting(f, p1, opts).value - apply_pair_commuting(f, p2, opts).value);
  r.delta_first = operator_norm(p1.first().matrix() - p2.first().matrix());
  r.delta_second = operator_norm(p1.second().matrix() - p2.second().matrix());
  r.rhs = sampling_certificate(f.sigma(), f.coefficient_bound()) * (r.delta_first + r.delta_second);
  r.ok = r.lhs <= r.rhs + tol;
  return r;
}

BesovLipschitzReport besov_lipschitz(const ExpSum2D& f, const CommutingDissipativePair& p1,
                                     const CommutingDissipativePair& p2, double tol, const CalculusOptions& opts) {
  if (p1.dim() != p2.dim()) throw InvalidArgument("pairs differ in dimension");
  BesovLipschitzReport r;
  r.lhs = operator_norm(apply_pair_commuting(f, p1, opts).value - apply_pair_commuting(f, p2, opts).value);
  const double delta = operator_norm(p1.first().matrix() - p2.first().matrix()) +
                       operator_norm(p1.second().matrix() - p2.second().matrix());
  const auto d = decompose(f);
  r.constant = d.constant;
  for (const auto& band : d.bands) {
    BandContribution c{band.n, band.f.sigma(), band.f.coefficient_bound(), 0.0};
    c.contribution = sampling_certificate(c.sigma, c.upper) * delta;
    r.rhs += c.contribution;
    r.bands.push_back(c);
  }
  r.ok = r.lhs <= r.rhs + tol;
  return r;
}

HolderSchattenReport holder_schatten_report(const ExpSum2D& f, const CommutingDissipativePair& p1,
                                            const CommutingDissipativePair& p2, double alpha, double p,
                                            const std::optional<Modulus>& modulus, const CalculusOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidExponent("Hoelder exponent must lie in (0, 1)");
  if (!(p > 1.0)) throw InvalidExponent("Schatten exponent must exceed 1");
  if (p1.dim() != p2.dim()) throw InvalidArgument("pairs differ in dimension");
  HolderSchattenReport r;
  r.alpha = alpha;
  r.p = p;
  const ComplexMatrix diff = apply_pair_commuting(f, p1, opts).value - apply_pair_commuting(f, p2, opts).value;
  r.lhs_op = operator_norm(diff);
  r.lhs_sp = schatten_norm(diff, p / alpha);
  const ComplexMatrix dl = p1.first().matrix() - p2.first().matrix();
  const ComplexMatrix dm = p1.second().matrix() - p2.second().matrix();
  const double big = std::max(operator_norm(dl), operator_norm(dm));
  r.holder_quantity = std::pow(big, alpha);
  const Modulus w = modulus ? *modulus : Modulus::power(alpha);
  r.omega_quantity = big > 0.0 ? omega_star(w, big) : 0.0;
  r.schatten_quantity = std::pow(std::max(schatten_norm(dl, p), schatten_norm(dm, p)), alpha);
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  r.ratio_holder = ratio(r.lhs_op, r.holder_quantity);
  r.ratio_omega = ratio(r.lhs_op, r.omega_quantity);
  r.ratio_schatten = ratio(r.lhs_sp, r.schatten_quantity);
  return r;
}

}  // namespace dissdoi
