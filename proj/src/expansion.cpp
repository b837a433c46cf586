#include "dissdoi/expansion.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dissdoi/errors.hpp"

namespace dissdoi {

namespace {

/// X (A)^{-1} for a shifted operand; A = X0 - node I.
ComplexMatrix right_divide(const ComplexMatrix& x, const ComplexMatrix& a) {
  Eigen::PartialPivLU<ComplexMatrix> lu(a.transpose());
  if (!(lu.rcond() > 1e-13)) throw RouteUnavailable("operand is numerically singular at a sampling node");
  return lu.solve(x.transpose()).transpose();
}

ComplexMatrix left_divide(const ComplexMatrix& a, const ComplexMatrix& x) {
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  if (!(lu.rcond() > 1e-13)) throw RouteUnavailable("operand is numerically singular at a sampling node");
  return lu.solve(x);
}

ComplexMatrix shifted(const ComplexMatrix& a, double node) {
  ComplexMatrix out = a;
  out.diagonal().array() -= node;
  return out;
}

class Bound : public BoundFactor {
 public:
  explicit Bound(std::function<ComplexMatrix(int)> fn) : fn_(std::move(fn)) {}
  ComplexMatrix at(int n) const override { return fn_(n); }

 private:
  std::function<ComplexMatrix(int)> fn_;
};

/// Delta f(x, 2 pi n/sigma) in x.
class SampledDifference : public FactorFamily {
 public:
  explicit SampledDifference(ExpSum1D f) : f_(std::move(f)) {}
  bool pair_argument() const override { return false; }
  Complex at(int n, Point p) const override { return sampled_difference(f_, n, p.x); }
  std::unique_ptr<BoundFactor> bind(const Operand& op, const CalculusOptions& opts) const override {
    const DissipativeMatrix& l = op.single();
    ComplexMatrix fl = apply_one(f_, l, opts).value;
    const ComplexMatrix lm = l.matrix();
    ExpSum1D f = f_;
    return std::make_unique<Bound>([fl, lm, f](int n) {
      const double node = sampling_node(n, f.sigma());
      ComplexMatrix top = fl;
      top.diagonal().array() -= f.value(node);
      return right_divide(top, shifted(lm, node));
    });
  }
  std::string describe() const override { return "sampled divided difference"; }

 private:
  ExpSum1D f_;
};

/// (e^{i sigma y} - 1)/(i(sigma y - 2 pi n)), optionally times y.
class SamplingBasis : public FactorFamily {
 public:
  SamplingBasis(double sigma, bool times_argument) : sigma_(sigma), times_(times_argument) {}
  bool pair_argument() const override { return false; }
  Complex at(int n, Point p) const override {
    return times_ ? anchor_right(sigma_, n, p.x) : sampling_basis(sigma_, n, p.x);
  }
  std::unique_ptr<BoundFactor> bind(const Operand& op, const CalculusOptions& opts) const override {
    const DissipativeMatrix& m = op.single();
    ComplexMatrix top = apply_one(ExpSum1D::exponential(sigma_), m, opts).value;
    top.diagonal().array() -= 1.0;
    const ComplexMatrix mm = m.matrix();
    const double sigma = sigma_;
    const bool times = times_;
    return std::make_unique<Bound>([top, mm, sigma, times](int n) {
      const ComplexMatrix basis = right_divide(top, kI * sigma * shifted(mm, sampling_node(n, sigma)));
      return times ? ComplexMatrix(mm * basis) : basis;
    });
  }
  std::string describe() const override { return times_ ? "anchored sampling basis" : "sampling basis"; }

 private:
  double sigma_;
  bool times_;
};

/// Pair factor: divided difference of f along one coordinate against a node.
class PairDifference : public FactorFamily {
 public:
  PairDifference(ExpSum2D f, Axis axis) : f_(std::move(f)), axis_(axis) {}
  bool pair_argument() const override { return true; }
  Complex at(int n, Point p) const override {
    return axis_ == Axis::y ? sampled_difference_second(f_, n, p.x, p.y) : sampled_difference_first(f_, n, p.x, p.y);
  }
  std::unique_ptr<BoundFactor> bind(const Operand& op, const CalculusOptions& opts) const override {
    const CommutingDissipativePair& pair = op.pair();
    const ComplexMatrix full = apply_pair_commuting(f_, pair, opts).value;
    // Matrices c_j e^{i (other frequency) X} for the coordinate kept fixed.
    ExponentialTable table(axis_ == Axis::y ? pair.first() : pair.second(), opts);
    std::vector<ComplexMatrix> parts;
    std::vector<double> freqs;
    for (const auto& t : f_.terms()) {
      const double kept = axis_ == Axis::y ? t.xi : t.eta;
      parts.push_back(t.coeff * table.at(kept));
      freqs.push_back(axis_ == Axis::y ? t.eta : t.xi);
    }
    const ComplexMatrix shift_base = axis_ == Axis::y ? pair.second().matrix() : pair.first().matrix();
    const double sigma = f_.sigma();
    const Axis axis = axis_;
    return std::make_unique<Bound>([full, parts, freqs, shift_base, sigma, axis](int n) {
      const double node = sampling_node(n, sigma);
      ComplexMatrix top = full;
      for (std::size_t j = 0; j < parts.size(); ++j) top -= std::exp(kI * freqs[j] * node) * parts[j];
      const ComplexMatrix a = shifted(shift_base, node);
      return axis == Axis::y ? right_divide(top, a) : left_divide(a, top);
    });
  }
  std::string describe() const override {
    return axis_ == Axis::y ? "second-coordinate sampled difference" : "first-coordinate sampled difference";
  }

 private:
  ExpSum2D f_;
  Axis axis_;
};

/// q_n(s) of the anchored expansion.
class AnchorCoefficient : public FactorFamily {
 public:
  explicit AnchorCoefficient(ExpSum2D f) : f_(std::move(f)) {}
  bool pair_argument() const override { return false; }
  Complex at(int n, Point p) const override { return anchor_left(f_, n, p.x); }
  std::unique_ptr<BoundFactor> bind(const Operand& op, const CalculusOptions& opts) const override {
    ExponentialTable table(op.single(), opts);
    std::vector<ComplexMatrix> parts;
    std::vector<double> etas;
    for (const auto& t : f_.terms()) {
      parts.push_back(t.coeff * table.at(t.xi));
      etas.push_back(t.eta);
    }
    const double sigma = f_.sigma();
    const auto dim = op.dim();
    return std::make_unique<Bound>([parts, etas, sigma, dim](int n) {
      ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
      const double node = sampling_node(n, sigma);
      for (std::size_t j = 0; j < parts.size(); ++j) {
        const Complex w = n == 0 ? kI * etas[j] : (std::exp(kI * etas[j] * node) - 1.0) / node;
        out += w * parts[j];
      }
      return out;
    });
  }
  std::string describe() const override { return "anchor coefficient"; }

 private:
  ExpSum2D f_;
};

class FiniteFamily : public FactorFamily {
 public:
  explicit FiniteFamily(std::vector<ExpSum1D> fs) : fs_(std::move(fs)) {}
  bool pair_argument() const override { return false; }
  Complex at(int n, Point p) const override { return fs_.at(static_cast<std::size_t>(n)).value(p.x); }
  std::unique_ptr<BoundFactor> bind(const Operand& op, const CalculusOptions& opts) const override {
    std::vector<ComplexMatrix> values;
    for (const auto& f : fs_) values.push_back(apply_one(f, op.single(), opts).value);
    return std::make_unique<Bound>([values](int n) { return values.at(static_cast<std::size_t>(n)); });
  }
  std::string describe() const override { return "finite list"; }

 private:
  std::vector<ExpSum1D> fs_;
};

}  // namespace

HaagerupExpansion::HaagerupExpansion(std::shared_ptr<const FactorFamily> left,
                                     std::shared_ptr<const FactorFamily> right, int truncation, bool symmetric,
                                     double certificate)
    : left_(std::move(left)),
      right_(std::move(right)),
      truncation_(truncation),
      symmetric_(symmetric),
      certificate_(certificate) {
  if (!left_ || !right_) throw InvalidArgument("expansion needs both factor families");
  if (truncation_ < (symmetric_ ? 0 : 1)) throw InvalidArgument("expansion truncation out of range");
  if (!(certificate_ >= 0.0)) throw InvalidArgument("certificate must be nonnegative");
}

HaagerupExpansion HaagerupExpansion::truncated(int n) const {
  return HaagerupExpansion(left_, right_, n, symmetric_, certificate_);
}

std::vector<int> HaagerupExpansion::indices(int from, int to) const {
  std::vector<int> out;
  if (symmetric_) {
    if (from < 0) out.push_back(0);
    for (int m = std::max(from, 0) + 1; m <= to; ++m) {
      out.push_back(m);
      out.push_back(-m);
    }
  } else {
    for (int m = std::max(from, 0); m < to; ++m) out.push_back(m);
  }
  return out;
}

Complex HaagerupExpansion::partial_sum(Point a, Point b, int n) const {
  if (n < 0) n = truncation_;
  Complex s{};
  for (int k : indices(-1, n)) s += left_->at(k, a) * right_->at(k, b);
  return s;
}

Complex HaagerupExpansion::extrapolated_sum(Point a, Point b, int n) const {
  if (n < 0) n = truncation_;
  const int half = n / 2;
  if (!symmetric_ || half < 1) return partial_sum(a, b, n);
  const Complex coarse = partial_sum(a, b, half);
  Complex fine = coarse;
  for (int k : indices(half, n)) fine += left_->at(k, a) * right_->at(k, b);
  const double a1 = n + 0.5, a0 = half + 0.5;
  return (a1 * fine - a0 * coarse) / (a1 - a0);
}

double sampling_certificate(double sigma, double coefficient_bound) {
  return 2.0 / std::sqrt(std::numbers::pi) * sigma * coefficient_bound;
}

HaagerupExpansion sampling_expansion_1d(const ExpSum1D& f, int n) {
  if (n < 1) throw InvalidArgument("sampling expansion needs N >= 1");
  return HaagerupExpansion(std::make_shared<SampledDifference>(f), std::make_shared<SamplingBasis>(f.sigma(), false),
                           n, true, sampling_certificate(f.sigma(), f.coefficient_bound()));
}

HaagerupExpansion sampling_expansion_2d(const ExpSum2D& f, Axis axis, int n) {
  if (n < 1) throw InvalidArgument("sampling expansion needs N >= 1");
  auto pair = std::make_shared<PairDifference>(f, axis);
  auto basis = std::make_shared<SamplingBasis>(f.sigma(), false);
  const double cert = sampling_certificate(f.sigma(), f.coefficient_bound());
  if (axis == Axis::y) return HaagerupExpansion(pair, basis, n, true, cert);
  return HaagerupExpansion(basis, pair, n, true, cert);
}

AnchorExpansion anchor_expansion(const ExpSum2D& f, int n) {
  if (n < 1) throw InvalidArgument("anchor expansion needs N >= 1");
  // r_n(t) = t psi_n(t) is unbounded on the line, so no finite certificate.
  return {f.slice_first(0.0),
          HaagerupExpansion(std::make_shared<AnchorCoefficient>(f), std::make_shared<SamplingBasis>(f.sigma(), true),
                            n, true, kInf)};
}

HaagerupExpansion finite_expansion(std::vector<ExpSum1D> left, std::vector<ExpSum1D> right) {
  if (left.size() != right.size() || left.empty())
    throw InvalidArgument("finite expansion needs equally many (and at least one) factors on each side");
  double row = 0.0;
  double col = 0.0;
  for (const auto& f : left) row += f.coefficient_bound() * f.coefficient_bound();
  for (const auto& f : right) col += f.coefficient_bound() * f.coefficient_bound();
  const int count = static_cast<int>(left.size());
  return HaagerupExpansion(std::make_shared<FiniteFamily>(std::move(left)),
                           std::make_shared<FiniteFamily>(std::move(right)), count, false,
                           std::sqrt(row) * std::sqrt(col));
}

}  // namespace dissdoi
