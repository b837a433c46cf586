#include "dissdoi/sample.hpp"

#include <cmath>
#include <numbers>

#include "dissdoi/errors.hpp"

namespace dissdoi {

ExpSum1D random_expsum_1d(Rng& rng, double sigma, int max_terms) {
  if (max_terms < 1) throw InvalidArgument("need at least one term");
  const int count = rng.integer(1, max_terms);
  std::vector<ExpSum1D::Term> terms;
  for (int k = 0; k < count; ++k) terms.push_back({rng.uniform(0.0, sigma), rng.complex_normal()});
  return ExpSum1D(sigma, std::move(terms));
}

ExpSum2D random_expsum_2d(Rng& rng, double sigma, int max_terms) {
  if (max_terms < 1) throw InvalidArgument("need at least one term");
  const int count = rng.integer(1, max_terms);
  std::vector<ExpSum2D::Term> terms;
  for (int k = 0; k < count; ++k) {
    const double radius = sigma * std::sqrt(rng.uniform());
    const double angle = 0.5 * std::numbers::pi * rng.uniform();
    terms.push_back({radius * std::cos(angle), radius * std::sin(angle), rng.complex_normal()});
  }
  return ExpSum2D(sigma, std::move(terms));
}

}  // namespace dissdoi
