#include "dissdoi/bandfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dissdoi/errors.hpp"

namespace dissdoi {

namespace {

constexpr double kFreqSlack = 1e-12;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("bandwidth must be positive and finite");
}

void check_coeff(Complex c) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InvalidArgument("non-finite coefficient");
}

Complex expi(double freq, Complex z) { return std::exp(kI * freq * z); }

/// (e^{i xi a} - e^{i xi b})/(a - b), stable for a near b.
Complex exp_dd(double freq, Complex a, Complex b) {
  return expi(freq, b) * kI * freq * phi1(kI * freq * (a - b));
}

}  // namespace

ExpSum1D::ExpSum1D(double sigma, std::vector<Term> terms) : sigma_(sigma) {
  check_sigma(sigma);
  std::map<double, Complex> merged;
  for (const auto& t : terms) {
    if (!std::isfinite(t.freq) || t.freq < 0.0 || t.freq > sigma * (1.0 + kFreqSlack)) {
      std::ostringstream os;
      os << "frequency " << t.freq << " outside [0, " << sigma << "]";
      throw InvalidArgument(os.str());
    }
    check_coeff(t.coeff);
    merged[std::min(t.freq, sigma)] += t.coeff;
  }
  for (const auto& [freq, coeff] : merged)
    if (coeff != Complex{}) terms_.push_back({freq, coeff});
}

ExpSum1D ExpSum1D::exponential(double freq, Complex c, double sigma) {
  if (sigma <= 0.0) sigma = freq > 0.0 ? freq : 1.0;
  return ExpSum1D(sigma, {{freq, c}});
}

double ExpSum1D::coefficient_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coeff);
  return s;
}

Complex ExpSum1D::value(Complex z) const {
  Complex s{};
  for (const auto& t : terms_) s += t.coeff * expi(t.freq, z);
  return s;
}

Complex ExpSum1D::derivative_at(Complex z) const {
  Complex s{};
  for (const auto& t : terms_) s += kI * t.freq * t.coeff * expi(t.freq, z);
  return s;
}

ExpSum1D ExpSum1D::derivative() const {
  std::vector<Term> out;
  for (const auto& t : terms_) out.push_back({t.freq, kI * t.freq * t.coeff});
  return ExpSum1D(sigma_, std::move(out));
}

ExpSum1D ExpSum1D::operator*(const ExpSum1D& other) const {
  std::vector<Term> out;
  for (const auto& a : terms_)
    for (const auto& b : other.terms_) out.push_back({a.freq + b.freq, a.coeff * b.coeff});
  return ExpSum1D(sigma_ + other.sigma_, std::move(out));
}

ExpSum1D ExpSum1D::operator+(const ExpSum1D& other) const {
  std::vector<Term> out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return ExpSum1D(std::max(sigma_, other.sigma_), std::move(out));
}

ExpSum1D ExpSum1D::scaled(Complex factor) const {
  std::vector<Term> out;
  for (const auto& t : terms_) out.push_back({t.freq, factor * t.coeff});
  return ExpSum1D(sigma_, std::move(out));
}

ExpSum2D::ExpSum2D(double sigma, std::vector<Term> terms) : sigma_(sigma) {
  check_sigma(sigma);
  std::map<std::pair<double, double>, Complex> merged;
  for (const auto& t : terms) {
    if (!std::isfinite(t.xi) || !std::isfinite(t.eta) || t.xi < 0.0 || t.eta < 0.0 ||
        std::hypot(t.xi, t.eta) > sigma * (1.0 + kFreqSlack)) {
      std::ostringstream os;
      os << "frequency (" << t.xi << ", " << t.eta << ") outside the quarter disc of radius " << sigma;
      throw InvalidArgument(os.str());
    }
    check_coeff(t.coeff);
    merged[{t.xi, t.eta}] += t.coeff;
  }
  for (const auto& [freq, coeff] : merged)
    if (coeff != Complex{}) terms_.push_back({freq.first, freq.second, coeff});
}

double ExpSum2D::coefficient_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coeff);
  return s;
}

Complex ExpSum2D::value(Complex x, Complex y) const {
  Complex s{};
  for (const auto& t : terms_) s += t.coeff * std::exp(kI * (t.xi * x + t.eta * y));
  return s;
}

ExpSum1D ExpSum2D::slice_first(Complex y) const {
  std::vector<ExpSum1D::Term> out;
  for (const auto& t : terms_) out.push_back({t.xi, t.coeff * expi(t.eta, y)});
  return ExpSum1D(sigma_, std::move(out));
}

ExpSum1D ExpSum2D::slice_second(Complex x) const {
  std::vector<ExpSum1D::Term> out;
  for (const auto& t : terms_) out.push_back({t.eta, t.coeff * expi(t.xi, x)});
  return ExpSum1D(sigma_, std::move(out));
}

ExpSum2D ExpSum2D::operator+(const ExpSum2D& other) const {
  std::vector<Term> out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return ExpSum2D(std::max(sigma_, other.sigma_), std::move(out));
}

ExpSum2D ExpSum2D::scaled(Complex factor) const {
  std::vector<Term> out;
  for (const auto& t : terms_) out.push_back({t.xi, t.eta, factor * t.coeff});
  return ExpSum2D(sigma_, std::move(out));
}

namespace {

void require_upper(Complex z, double tol) {
  if (z.imag() < -tol) {
    std::ostringstream os;
    os << "point " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
       << "i lies below the real axis";
    throw LowerHalfPlane(os.str());
  }
}

}  // namespace

Complex eval(const ExpSum1D& f, Complex z, double tol) {
  require_upper(z, tol);
  return f.value(z);
}

Complex eval(const ExpSum2D& f, Complex x, Complex y, double tol) {
  require_upper(x, tol);
  require_upper(y, tol);
  return f.value(x, y);
}

namespace {

double grid_point(const SupGrid& g, int k) {
  if (g.points <= 1) return 0.0;
  return -g.half_width + 2.0 * g.half_width * k / (g.points - 1);
}

}  // namespace

SupNorm sup_norm(const ExpSum1D& f, const SupGrid& grid) {
  double best = 0.0;
  for (int k = 0; k < grid.points; ++k) best = std::max(best, std::abs(f.value(grid_point(grid, k))));
  const double upper = f.coefficient_bound();
  return {upper, std::min(best, upper)};
}

SupNorm sup_norm(const ExpSum2D& f, const SupGrid& grid) {
  double best = 0.0;
  for (int j = 0; j < grid.points; ++j)
    for (int k = 0; k < grid.points; ++k)
      best = std::max(best, std::abs(f.value(grid_point(grid, j), grid_point(grid, k))));
  const double upper = f.coefficient_bound();
  return {upper, std::min(best, upper)};
}

double derivative_grid_sup(const ExpSum1D& f, const SupGrid& grid) {
  double best = 0.0;
  for (int k = 0; k < grid.points; ++k) best = std::max(best, std::abs(f.derivative_at(grid_point(grid, k))));
  return best;
}

Complex phi1(Complex z) {
  if (std::abs(z) < 0.5) {
    // sum_{k>=0} z^k/(k+1)!
    Complex term = 1.0;
    Complex sum = 1.0;
    for (int k = 1; k < 30; ++k) {
      term *= z / static_cast<double>(k + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

Complex divided_difference(const ExpSum1D& f, Complex x, Complex y, double switch_at) {
  const Complex d = x - y;
  if (std::abs(d) > switch_at) return (f.value(x) - f.value(y)) / d;
  Complex s{};
  for (const auto& t : f.terms()) s += t.coeff * exp_dd(t.freq, x, y);
  return s;
}

Complex partial_dd(const ExpSum2D& f, Axis axis, Complex a, Complex b, Complex c) {
  if (axis == Axis::x) return divided_difference(f.slice_first(c), a, b);
  return divided_difference(f.slice_second(a), b, c);
}

Complex sampling_basis(double sigma, int n, Complex y) {
  return phi1(kI * sigma * (y - sampling_node(n, sigma)));
}

Complex sampled_difference(const ExpSum1D& f, int n, Complex x) {
  return divided_difference(f, x, sampling_node(n, f.sigma()));
}

Complex sampled_difference_second(const ExpSum2D& f, int n, Complex x1, Complex y1) {
  const double node = sampling_node(n, f.sigma());
  const Complex d = y1 - node;
  Complex s{};
  if (std::abs(d) > kDiagonalSwitch) {
    for (const auto& t : f.terms()) s += t.coeff * expi(t.xi, x1) * (expi(t.eta, y1) - expi(t.eta, node));
    return s / d;
  }
  for (const auto& t : f.terms()) s += t.coeff * expi(t.xi, x1) * exp_dd(t.eta, y1, node);
  return s;
}

Complex sampled_difference_first(const ExpSum2D& f, int n, Complex x2, Complex y2) {
  const double node = sampling_node(n, f.sigma());
  const Complex d = x2 - node;
  Complex s{};
  if (std::abs(d) > kDiagonalSwitch) {
    for (const auto& t : f.terms()) s += t.coeff * expi(t.eta, y2) * (expi(t.xi, x2) - expi(t.xi, node));
    return s / d;
  }
  for (const auto& t : f.terms()) s += t.coeff * expi(t.eta, y2) * exp_dd(t.xi, x2, node);
  return s;
}

Complex anchor_left(const ExpSum2D& f, int n, Complex s) {
  Complex out{};
  if (n == 0) {
    for (const auto& t : f.terms()) out += t.coeff * kI * t.eta * expi(t.xi, s);
    return out;
  }
  const double node = sampling_node(n, f.sigma());
  for (const auto& t : f.terms()) out += t.coeff * expi(t.xi, s) * (expi(t.eta, node) - 1.0);
  return out / node;
}

Complex anchor_right(double sigma, int n, Complex t) { return t * sampling_basis(sigma, n, t); }

ExpSum1D anchor_coefficient(const ExpSum2D& f, int n) {
  std::vector<ExpSum1D::Term> out;
  if (n == 0) {
    for (const auto& t : f.terms()) out.push_back({t.xi, t.coeff * kI * t.eta});
  } else {
    const double node = sampling_node(n, f.sigma());
    for (const auto& t : f.terms()) out.push_back({t.xi, t.coeff * (expi(t.eta, node) - 1.0) / node});
  }
  return ExpSum1D(f.sigma(), std::move(out));
}

ScalarSeries symmetric_series(const std::function<Complex(int)>& term, int n_max, int n_start) {
  if (n_max < 1 || n_start < 1) throw InvalidArgument("series truncation must be >= 1");
  std::vector<int> levels{n_max};
  for (int next = (n_max + 1) / 2; next >= n_start && next < levels.back(); next = (next + 1) / 2) levels.push_back(next);
  std::reverse(levels.begin(), levels.end());
  ScalarSeries out;
  Complex s = term(0);
  int done = 0;
  for (int level : levels) {
    for (int n = done + 1; n <= level; ++n) s += term(n) + term(-n);
    if (out.levels.empty()) {
      out.extrapolated.push_back(s);
    } else {
      const double a1 = level + 0.5, a0 = out.levels.back() + 0.5;
      out.extrapolated.push_back((a1 * s - a0 * out.partial.back()) / (a1 - a0));
    }
    out.levels.push_back(level);
    out.partial.push_back(s);
    done = level;
  }
  return out;
}

Complex symmetric_sum(const std::function<Complex(int)>& term, int N) {
  Complex s = term(0);
  for (int n = 1; n <= N; ++n) s += term(n) + term(-n);
  return s;
}

double column_square_sum(double sigma, Complex y, int N) {
  double s = std::norm(sampling_basis(sigma, 0, y));
  for (int n = 1; n <= N; ++n) s += std::norm(sampling_basis(sigma, n, y)) + std::norm(sampling_basis(sigma, -n, y));
  return s;
}

double row_square_sum(const ExpSum1D& f, double x, int N) {
  const auto series = symmetric_series([&](int n) { return Complex(std::norm(sampled_difference(f, n, x))); }, N);
  return series.best().real();
}

Complex real_line_integral(const std::function<Complex(double)>& g, double center, double max_frequency,
                           const LineQuadrature& q) {
  if (q.quad_points < 16) throw InvalidArgument("quadrature needs at least 16 points");
  using Rule = boost::math::quadrature::gauss<double, 16>;
  const double h = std::min(1.0, 4.0 / std::max(max_frequency, 1e-12));
  const int panels0 = (q.quad_points + 15) / 16;
  auto panel = [&](double a) {
    const double mid = a + 0.5 * h;
    Complex s{};
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    // Symmetric 16-point rule stored as 8 non-negative abscissae.
    for (std::size_t k = 0; k < x.size(); ++k) {
      s += w[k] * (g(mid + 0.5 * h * x[k]) + g(mid - 0.5 * h * x[k]));
    }
    return 0.5 * h * s;
  };

  // Panels are laid out symmetrically around the center; level k covers
  // [center - T_k, center + T_k] with T_k = panels0 * 2^k * h / 2.
  int half_panels = (panels0 + 1) / 2;
  Complex total{};
  for (int p = 0; p < half_panels; ++p) total += panel(center + p * h) + panel(center - (p + 1) * h);

  Complex prev_total = total;
  Complex prev_extrap{};
  int settled = 0;
  for (int k = 1; k <= q.max_doublings; ++k) {
    const int next = 2 * half_panels;
    for (int p = half_panels; p < next; ++p) total += panel(center + p * h) + panel(center - (p + 1) * h);
    half_panels = next;
    const Complex extrap = 2.0 * total - prev_total;
    if (k >= 2) {
      const double change = std::abs(extrap - prev_extrap);
      settled = change <= q.tol * std::max(1.0, std::abs(extrap)) ? settled + 1 : 0;
      if (settled >= 2) return extrap;
    }
    prev_total = total;
    prev_extrap = extrap;
  }
  std::ostringstream os;
  os << "window doublings disagree after " << q.max_doublings << " steps (half width "
     << half_panels * h << ")";
  throw QuadratureNotConverged(os.str());
}

double row_square_integral(const ExpSum1D& f, double x, const LineQuadrature& q) {
  const double sigma = f.sigma();
  const Complex v = real_line_integral(
      [&](double t) { return Complex(std::norm(divided_difference(f, x, t))); }, x, 2.0 * sigma, q);
  return sigma / kTwoPi * v.real();
}

Complex kernel_dd_check(const ExpSum1D& f, Complex x, Complex y, const LineQuadrature& q) {
  if (q.quad_points < 1000) throw InvalidArgument("kernel quadrature needs at least 1000 points");
  const double sigma = f.sigma();
  const Complex v = real_line_integral(
      [&](double t) { return divided_difference(f, x, t) * kI * sigma * phi1(kI * sigma * (y - t)); },
      0.5 * (x.real() + y.real()), 2.0 * sigma, q);
  return v / (kTwoPi * kI);
}

Regularized::Regularized(ExpSum1D f, double eps) : f_(std::move(f)), eps_(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("regularization parameter must be positive");
}

Complex Regularized::value(Complex z) const { return f_.value(z) / (1.0 - kI * eps_ * z); }

Complex Regularized::derivative_at(Complex z) const {
  const Complex d = 1.0 - kI * eps_ * z;
  return f_.derivative_at(z) / d + kI * eps_ * f_.value(z) / (d * d);
}

Complex Regularized::divided_difference(Complex x, Complex y) const {
  const Complex d = x - y;
  if (d == Complex{}) return derivative_at(x);
  if (std::abs(d) <= kDiagonalSwitch) return derivative_at(0.5 * (x + y));
  return (value(x) - value(y)) / d;
}

RegularizationCheck regularize_eps(const ExpSum1D& f, double eps, const std::vector<Complex>& xs,
                                   const std::vector<Complex>& ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("regularization check: point lists differ in length");
  Regularized reg(f, eps);
  double worst = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Complex x = xs[k];
    const Complex y = ys[k];
    const Complex shift = 1.0 - kI * eps * y;
    const Complex lhs = reg.divided_difference(x, y);
    const Complex rhs = dissdoi::divided_difference(f, x, y) / shift + kI * eps * reg.value(x) / shift;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {std::move(reg), worst};
}

Modulus Modulus::power(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) throw InvalidArgument("power modulus exponent must lie in (0, 1]");
  Modulus m;
  m.kind_ = Kind::power;
  m.alpha_ = alpha;
  m.name_ = "power";
  return m;
}

Modulus Modulus::tabulated(std::vector<std::pair<double, double>> points, double tail_exponent) {
  if (points.empty() || points.front().first != 0.0) points.insert(points.begin(), {0.0, 0.0});
  if (points.front().second != 0.0) throw InvalidArgument("tabulated modulus must vanish at 0");
  if (points.size() < 2) throw InvalidArgument("tabulated modulus needs at least one positive node");
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (!(points[k].first > points[k - 1].first)) throw InvalidArgument("tabulated modulus nodes must increase");
    if (points[k].second < points[k - 1].second) throw InvalidArgument("tabulated modulus must be nondecreasing");
  }
  if (!(tail_exponent >= 0.0) || tail_exponent > 1.0)
    throw InvalidArgument("tail exponent must lie in [0, 1]");
  Modulus m;
  m.kind_ = Kind::tabulated;
  m.table_ = std::move(points);
  m.tail_exponent_ = tail_exponent;
  m.name_ = "tabulated";
  return m;
}

Modulus Modulus::custom(std::function<double(double)> fn, std::string name) {
  if (!fn) throw InvalidArgument("custom modulus needs a callable");
  Modulus m;
  m.kind_ = Kind::custom;
  m.fn_ = std::move(fn);
  m.name_ = std::move(name);
  return m;
}

double Modulus::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::power:
      return std::pow(t, alpha_);
    case Kind::custom:
      return fn_(t);
    case Kind::tabulated: {
      const auto& last = table_.back();
      if (t >= last.first) return last.second * std::pow(t / last.first, tail_exponent_);
      const auto it = std::upper_bound(table_.begin(), table_.end(), t,
                                       [](double v, const auto& p) { return v < p.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      return lo.second + (hi.second - lo.second) * (t - lo.first) / (hi.first - lo.first);
    }
  }
  return 0.0;
}

bool Modulus::check_on_grid(const std::vector<double>& ts, double tol) const {
  if (std::abs((*this)(0.0)) > tol) return false;
  std::vector<double> sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if ((*this)(sorted[k]) + tol < (*this)(sorted[k - 1])) return false;
  for (double a : ts)
    for (double b : ts)
      if ((*this)(a + b) > (*this)(a) + (*this)(b) + tol) return false;
  return true;
}

namespace {

void check_s(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("omega_star needs s > 0");
}

}  // namespace

double omega_star(const Modulus& w, double s) {
  check_s(s);
  switch (w.kind_) {
    case Modulus::Kind::power:
      if (w.alpha_ >= 1.0) throw DivergentModulus("w(t)/t^2 is not integrable at infinity for exponent >= 1");
      return std::pow(s, w.alpha_) / (1.0 - w.alpha_);
    case Modulus::Kind::custom:
      return omega_star_quadrature(w, s);
    case Modulus::Kind::tabulated: {
      const double beta = w.tail_exponent_;
      const auto& table = w.table_;
      const auto& last = table.back();
      if (beta >= 1.0) throw DivergentModulus("tabulated tail grows linearly");
      double integral = 0.0;
      double lo = s;
      for (std::size_t k = 1; k < table.size(); ++k) {
        const double a = table[k - 1].first;
        const double b = table[k].first;
        if (b <= lo) continue;
        const double from = std::max(a, lo);
        const double slope = (table[k].second - table[k - 1].second) / (b - a);
        const double intercept = table[k - 1].second - slope * a;
        integral += intercept * (1.0 / from - 1.0 / b) + slope * std::log(b / from);
      }
      const double start = std::max(lo, last.first);
      // int_start^inf w_K (t/t_K)^beta / t^2 dt
      integral += last.second * std::pow(last.first, -beta) * std::pow(start, beta - 1.0) / (1.0 - beta);
      return s * integral;
    }
  }
  return 0.0;
}

double omega_star_quadrature(const Modulus& w, double s) {
  check_s(s);
  // With t = s/u the quantity becomes int_0^1 w(s/u) du. Integrate over
  // dyadic pieces [2^{-k-1}, 2^{-k}] and close with the geometric tail
  // implied by the ratio of successive pieces.
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto integrand = [&](double u) { return w(s / u); };
  double total = 0.0;
  double prev_piece = 0.0;
  double prev_ratio = -1.0;
  constexpr int kMaxPieces = 1000;
  for (int k = 0; k < kMaxPieces; ++k) {
    const double hi = std::ldexp(1.0, -k);
    const double lo = 0.5 * hi;
    const double piece = Rule::integrate(integrand, lo, hi, 12, 1e-13);
    if (!std::isfinite(piece)) throw DivergentModulus("integrand is not finite");
    total += piece;
    if (k >= 1 && prev_piece > 0.0) {
      const double ratio = piece / prev_piece;
      if (k >= 24 && ratio >= 1.0 - 1e-9) {
        std::ostringstream os;
        os << "dyadic pieces stop decaying (ratio " << ratio << ")";
        throw DivergentModulus(os.str());
      }
      const bool steady = prev_ratio > 0.0 && std::abs(ratio - prev_ratio) <= 1e-11 * ratio;
      if (k >= 24 && ratio < 1.0) {
        const double tail = piece * ratio / (1.0 - ratio);
        if (steady || tail <= 1e-13 * total || k >= 200) return total + tail;
      }
      prev_ratio = ratio;
    }
    if (piece == 0.0 && k >= 24) return total;
    prev_piece = piece;
  }
  throw DivergentModulus("quadrature did not settle");
}

}  // namespace dissdoi
