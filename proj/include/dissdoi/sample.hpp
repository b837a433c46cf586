#pragma once

#include "dissdoi/bandfun.hpp"
#include "dissdoi/random.hpp"

namespace dissdoi {

/// Between 1 and max_terms terms, frequencies uniform in [0, sigma],
/// complex Gaussian coefficients.
ExpSum1D random_expsum_1d(Rng& rng, double sigma, int max_terms = 4);

/// Frequencies uniform in the closed quarter disc of radius sigma.
ExpSum2D random_expsum_2d(Rng& rng, double sigma, int max_terms = 4);

}  // namespace dissdoi
