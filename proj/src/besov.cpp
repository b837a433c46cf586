#include "dissdoi/besov.hpp"

#include <cmath>
#include <map>

namespace dissdoi {

double WindowW::profile(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double WindowW::operator()(double t) const {
  if (t <= 0.5 || t >= 2.0) return 0.0;
  if (t <= 1.0) return profile(2.0 * t - 1.0);
  return 1.0 - profile(t - 1.0);
}

WindowW build_w() { return WindowW{}; }

namespace {

/// Band indices n with w(r/2^n) > 0, i.e. r/2^n in (1/2, 2).
std::vector<std::pair<int, double>> band_weights(double r) {
  std::vector<std::pair<int, double>> out;
  const WindowW w;
  const int centre = static_cast<int>(std::floor(std::log2(r)));
  for (int n = centre - 2; n <= centre + 2; ++n) {
    const double weight = w(r / std::ldexp(1.0, n));
    if (weight > 0.0) out.emplace_back(n, weight);
  }
  return out;
}

}  // namespace

BandDecomposition<ExpSum1D> decompose(const ExpSum1D& f) {
  BandDecomposition<ExpSum1D> out;
  std::map<int, std::vector<ExpSum1D::Term>> bands;
  for (const auto& t : f.terms()) {
    if (t.freq == 0.0) {
      out.constant += t.coeff;
      continue;
    }
    for (const auto& [n, weight] : band_weights(t.freq)) bands[n].push_back({t.freq, weight * t.coeff});
  }
  for (auto& [n, terms] : bands) out.bands.push_back({n, ExpSum1D(std::ldexp(1.0, n + 1), std::move(terms))});
  return out;
}

BandDecomposition<ExpSum2D> decompose(const ExpSum2D& f) {
  BandDecomposition<ExpSum2D> out;
  std::map<int, std::vector<ExpSum2D::Term>> bands;
  for (const auto& t : f.terms()) {
    const double r = std::hypot(t.xi, t.eta);
    if (r == 0.0) {
      out.constant += t.coeff;
      continue;
    }
    for (const auto& [n, weight] : band_weights(r)) bands[n].push_back({t.xi, t.eta, weight * t.coeff});
  }
  for (auto& [n, terms] : bands) out.bands.push_back({n, ExpSum2D(std::ldexp(1.0, n + 1), std::move(terms))});
  return out;
}

namespace {

template <class F>
BesovNorm aggregate(const BandDecomposition<F>& d, const SupGrid& grid) {
  BesovNorm out{0.0, 0.0};
  for (const auto& band : d.bands) {
    const SupNorm s = sup_norm(band.f, grid);
    const double scale = std::ldexp(1.0, band.n);
    out.upper += scale * s.upper;
    out.grid += scale * s.grid_estimate;
  }
  return out;
}

}  // namespace

BesovNorm besov_norm(const ExpSum1D& f, const SupGrid& grid) { return aggregate(decompose(f), grid); }

BesovNorm besov_norm(const ExpSum2D& f, const SupGrid& grid) { return aggregate(decompose(f), grid); }

}  // namespace dissdoi
