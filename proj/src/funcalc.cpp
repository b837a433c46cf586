#include "dissdoi/funcalc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "dissdoi/errors.hpp"

namespace dissdoi {

std::string_view to_string(Route route) {
  switch (route) {
    case Route::spectral:
      return "spectral";
    case Route::taylor_cayley:
      return "taylor-cayley";
    case Route::anchor_series:
      return "anchor-series";
    case Route::separated:
      return "separated";
  }
  return "spectral";
}

namespace {

constexpr double kEps = 2.220446049250313e-16;

// FFTW's planner is not re-entrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftBuffer {
 public:
  FftBuffer(int rows, int cols) : size_(static_cast<std::size_t>(rows) * cols) {
    data_ = fftw_alloc_complex(size_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = rows == 1 ? fftw_plan_dft_1d(cols, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE)
                      : fftw_plan_dft_2d(rows, cols, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~FftBuffer() {
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(data_);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(data_); }
  void execute() { fftw_execute(plan_); }

 private:
  std::size_t size_;
  fftw_complex* data_;
  fftw_plan plan_;
};

/// Inverse Cayley map of the unit disc onto the upper half-plane.
Complex disc_to_half_plane(Complex z) { return kI * (1.0 + z) / (1.0 - z); }

double spectral_radius(const ComplexMatrix& t) {
  double r = 0.0;
  for (const auto& v : eigenvalues(t)) r = std::max(r, std::abs(v));
  return r;
}

int fft_length(double rho, int minimum, int terms) {
  // rho^P below 1e-17 keeps the aliasing error under the working precision.
  const double needed = std::max({static_cast<double>(minimum), 2.0 * terms, 39.2 / -std::log(rho)});
  int p = 1;
  while (p < needed) p *= 2;
  return p;
}

int term_estimate(double rho_t) {
  if (rho_t < 1e-3) return 64;
  // rho_t^k below 1e-17, doubled for polynomial growth of non-normal powers.
  return static_cast<int>(std::ceil(2.0 * 39.2 / -std::log(rho_t))) + 64;
}

CalculusResult taylor_one(const ExpSum1D& f, const DissipativeMatrix& l, const TaylorOptions& opts) {
  const auto n = l.dim();
  const ComplexMatrix t = cayley(l);
  const double rho_t = spectral_radius(t);
  if (rho_t > opts.max_cayley_radius) {
    std::ostringstream os;
    os << "Cayley spectral radius " << rho_t << " exceeds " << opts.max_cayley_radius;
    throw RouteUnavailable(os.str());
  }
  const double rho = std::max(opts.radius, 0.5 * (1.0 + rho_t));
  const int k_max = std::min(term_estimate(rho_t), opts.max_terms);
  const int p = fft_length(rho, opts.points, k_max);

  FftBuffer buf(1, p);
  Complex* g = buf.data();
  for (int j = 0; j < p; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / p;
    g[j] = f.value(disc_to_half_plane(std::polar(rho, theta)));
  }
  buf.execute();
  const double log_rho = std::log(rho);
  auto coeff = [&](int k) { return g[k] * std::exp(-k * log_rho) / static_cast<double>(p); };

  const double bound = f.coefficient_bound();
  ComplexMatrix sum = coeff(0) * identity(n);
  ComplexMatrix power = identity(n);
  int quiet = 0;
  double last_tail = bound;
  for (int k = 1; k < std::min(k_max, p); ++k) {
    power = power * t;
    sum += coeff(k) * power;
    const double pn = power.norm();
    last_tail = bound * pn;
    quiet = last_tail <= opts.tail_tol * std::max(1.0, bound) ? quiet + 1 : 0;
    if (quiet >= 16) {
      return {sum, Route::taylor_cayley, 16.0 * last_tail + 1e3 * kEps * std::max(1.0, bound)};
    }
  }
  std::ostringstream os;
  os << "power series did not reach its plateau within " << k_max << " terms (tail " << last_tail << ")";
  throw RouteUnavailable(os.str());
}

CalculusResult spectral_one(const ExpSum1D& f, const DissipativeMatrix& l, const EigOptions& eo) {
  const SpectralData s = eig(l.matrix(), eo);
  std::vector<Complex> values;
  values.reserve(s.eigenvalues.size());
  // Eigenvalues of a dissipative matrix sit in the closed upper half-plane;
  // allow for the eigensolver's backward error.
  const double slack = 1e-8 * std::max(1.0, operator_norm(l.matrix())) * s.basis_condition;
  for (const auto& lam : s.eigenvalues) values.push_back(eval(f, lam, slack));
  const double est = 10.0 * kEps * s.basis_condition * static_cast<double>(l.dim()) *
                     std::max(1.0, f.coefficient_bound());
  return {from_spectral(s, values), Route::spectral, est};
}

void require_dims(const DissipativeMatrix& a, const DissipativeMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("operands differ in dimension");
}

}  // namespace

CalculusResult apply_one(const ExpSum1D& f, const DissipativeMatrix& l, const CalculusOptions& opts) {
  switch (opts.route) {
    case RouteChoice::spectral:
      return spectral_one(f, l, opts.eig);
    case RouteChoice::taylor_cayley:
      return taylor_one(f, l, opts.taylor);
    case RouteChoice::separated:
    case RouteChoice::automatic:
      break;
  }
  try {
    return spectral_one(f, l, opts.eig);
  } catch (const DefectiveMatrix&) {
    return taylor_one(f, l, opts.taylor);
  }
}

ExtendedResult apply_one_extended(const ExpSum1D& f_i, const DissipativeMatrix& l, const CalculusOptions& opts) {
  const ComplexMatrix inner = apply_one(f_i, l, opts).value;
  const ComplexMatrix shift = l.matrix() + kI * identity(l.dim());
  const ComplexMatrix left = shift * inner;
  return {left, operator_norm(left - inner * shift)};
}

Operand::Operand(DissipativeMatrix m) : v_(std::move(m)) {}
Operand::Operand(CommutingDissipativePair p) : v_(std::move(p)) {}

const DissipativeMatrix& Operand::single() const {
  if (is_pair()) throw InvalidArgument("expected a single matrix argument, got a pair");
  return std::get<DissipativeMatrix>(v_);
}

const CommutingDissipativePair& Operand::pair() const {
  if (!is_pair()) throw InvalidArgument("expected a commuting pair argument, got a single matrix");
  return std::get<CommutingDissipativePair>(v_);
}

Eigen::Index Operand::dim() const { return is_pair() ? pair().dim() : single().dim(); }

std::optional<JointSpectrum> diagonalize(const Operand& op, const EigOptions& opts) {
  if (!op.is_pair()) {
    try {
      SpectralData s = eig(op.single().matrix(), opts);
      return JointSpectrum{std::move(s.right_basis), std::move(s.inverse_basis), std::move(s.eigenvalues), {},
                           s.basis_condition};
    } catch (const DefectiveMatrix&) {
      return std::nullopt;
    }
  }
  const ComplexMatrix& l = op.pair().first().matrix();
  const ComplexMatrix& m = op.pair().second().matrix();
  // A generic combination separates joint eigenvalues of a commuting pair.
  const Complex theta(0.6180339887498949, 0.3090169943749474);
  SpectralData s;
  try {
    s = eig(l + theta * m, opts);
  } catch (const DefectiveMatrix&) {
    return std::nullopt;
  }
  const ComplexMatrix dl = s.inverse_basis * l * s.right_basis;
  const ComplexMatrix dm = s.inverse_basis * m * s.right_basis;
  const double scale = std::max(1.0, operator_norm(l) + operator_norm(m));
  const double off_l = (dl - ComplexMatrix(dl.diagonal().asDiagonal())).norm();
  const double off_m = (dm - ComplexMatrix(dm.diagonal().asDiagonal())).norm();
  if (off_l + off_m > 1e-9 * scale * s.basis_condition) return std::nullopt;
  JointSpectrum out;
  out.basis = std::move(s.right_basis);
  out.inverse = std::move(s.inverse_basis);
  out.condition = s.basis_condition;
  for (Eigen::Index k = 0; k < dl.rows(); ++k) {
    out.first.push_back(dl(k, k));
    out.second.push_back(dm(k, k));
  }
  return out;
}

ExponentialTable::ExponentialTable(DissipativeMatrix x, CalculusOptions opts)
    : x_(std::move(x)), opts_(opts) {
  if (opts_.route == RouteChoice::automatic || opts_.route == RouteChoice::spectral) {
    try {
      spectral_ = eig(x_.matrix(), opts_.eig);
    } catch (const DefectiveMatrix&) {
      if (opts_.route == RouteChoice::spectral) throw;
    }
  }
}

const ComplexMatrix& ExponentialTable::at(double freq) {
  auto it = cache_.find(freq);
  if (it != cache_.end()) return it->second;
  ComplexMatrix value;
  if (freq == 0.0) {
    value = identity(x_.dim());
  } else if (spectral_) {
    std::vector<Complex> vals;
    for (const auto& lam : spectral_->eigenvalues) vals.push_back(std::exp(kI * freq * lam));
    value = from_spectral(*spectral_, vals);
  } else {
    CalculusOptions o = opts_;
    o.route = RouteChoice::taylor_cayley;
    value = apply_one(ExpSum1D::exponential(freq), x_, o).value;
  }
  return cache_.emplace(freq, std::move(value)).first->second;
}

ComplexMatrix separated_value(const ExpSum2D& f, const DissipativeMatrix& l, const DissipativeMatrix& m,
                              const CalculusOptions& opts) {
  require_dims(l, m);
  ExponentialTable el(l, opts);
  ExponentialTable em(m, opts);
  ComplexMatrix out = ComplexMatrix::Zero(l.dim(), l.dim());
  for (const auto& t : f.terms()) out += t.coeff * el.at(t.xi) * em.at(t.eta);
  return out;
}

namespace {

CalculusResult taylor_pair(const ExpSum2D& f, const CommutingDissipativePair& p, const TaylorOptions& opts) {
  const auto n = p.dim();
  const ComplexMatrix t = cayley(p.first());
  const ComplexMatrix r = cayley(p.second());
  const double rho_t = spectral_radius(t);
  const double rho_r = spectral_radius(r);
  if (std::max(rho_t, rho_r) > opts.bivariate_max_radius) {
    std::ostringstream os;
    os << "Cayley spectral radii " << rho_t << ", " << rho_r << " exceed the bivariate cap "
       << opts.bivariate_max_radius;
    throw RouteUnavailable(os.str());
  }
  const int pts = opts.bivariate_points;
  const double rho = std::max(opts.radius, 0.5 * (1.0 + std::max(rho_t, rho_r)));
  if (std::pow(rho, pts) > 1e-17) throw RouteUnavailable("bivariate FFT grid too coarse for the radius");

  std::vector<Complex> nodes(pts);
  for (int j = 0; j < pts; ++j)
    nodes[j] = disc_to_half_plane(std::polar(rho, 2.0 * std::numbers::pi * j / pts));

  FftBuffer buf(pts, pts);
  Complex* g = buf.data();
  std::fill(g, g + static_cast<std::size_t>(pts) * pts, Complex{});
  std::vector<Complex> u(pts), v(pts);
  for (const auto& term : f.terms()) {
    for (int j = 0; j < pts; ++j) {
      u[j] = term.coeff * std::exp(kI * term.xi * nodes[j]);
      v[j] = std::exp(kI * term.eta * nodes[j]);
    }
    for (int j = 0; j < pts; ++j)
      for (int k = 0; k < pts; ++k) g[static_cast<std::size_t>(j) * pts + k] += u[j] * v[k];
  }
  buf.execute();
  const double log_rho = std::log(rho);
  const double scale = 1.0 / (static_cast<double>(pts) * pts);
  auto coeff = [&](int j, int k) {
    return g[static_cast<std::size_t>(j) * pts + k] * std::exp(-(j + k) * log_rho) * scale;
  };

  auto powers_until_small = [&](const ComplexMatrix& x) {
    std::vector<ComplexMatrix> out{identity(n)};
    while (static_cast<int>(out.size()) < pts / 2) {
      out.push_back(out.back() * x);
      if (out.back().norm() <= 1e-18) break;
    }
    if (static_cast<int>(out.size()) >= pts / 2 && out.back().norm() > 1e-14)
      throw RouteUnavailable("bivariate power series too slow for the FFT grid");
    return out;
  };
  const auto tp = powers_until_small(t);
  const auto rp = powers_until_small(r);

  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j < tp.size(); ++j) {
    ComplexMatrix inner = ComplexMatrix::Zero(n, n);
    for (std::size_t k = 0; k < rp.size(); ++k) inner += coeff(static_cast<int>(j), static_cast<int>(k)) * rp[k];
    sum += tp[j] * inner;
  }
  const double est = 1e3 * kEps * std::max(1.0, f.coefficient_bound());
  return {sum, Route::taylor_cayley, est};
}

CalculusResult spectral_pair(const ExpSum2D& f, const CommutingDissipativePair& p, const EigOptions& eo) {
  const auto js = diagonalize(Operand(p), eo);
  if (!js) throw RouteUnavailable("no common eigenbasis within the conditioning cap");
  const double slack = 1e-8 * std::max(1.0, operator_norm(p.first().matrix()) + operator_norm(p.second().matrix())) *
                       js->condition;
  ComplexMatrix scaled = js->basis;
  for (Eigen::Index k = 0; k < scaled.cols(); ++k) scaled.col(k) *= eval(f, js->first[k], js->second[k], slack);
  const double est = 10.0 * kEps * js->condition * static_cast<double>(p.dim()) * std::max(1.0, f.coefficient_bound());
  return {scaled * js->inverse, Route::spectral, est};
}

}  // namespace

CalculusResult apply_pair_commuting(const ExpSum2D& f, const CommutingDissipativePair& p,
                                    const CalculusOptions& opts) {
  switch (opts.route) {
    case RouteChoice::spectral:
      return spectral_pair(f, p, opts.eig);
    case RouteChoice::taylor_cayley:
      return taylor_pair(f, p, opts.taylor);
    case RouteChoice::separated:
      return {separated_value(f, p.first(), p.second(), opts), Route::separated,
              1e3 * kEps * std::max(1.0, f.coefficient_bound())};
    case RouteChoice::automatic:
      break;
  }
  try {
    return spectral_pair(f, p, opts.eig);
  } catch (const RouteUnavailable&) {
    CalculusOptions o = opts;
    o.route = RouteChoice::automatic;
    return {separated_value(f, p.first(), p.second(), o), Route::separated,
            1e3 * kEps * std::max(1.0, f.coefficient_bound())};
  }
}

}  // namespace dissdoi
