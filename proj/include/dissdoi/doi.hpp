#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dissdoi/bandfun.hpp"
#include "dissdoi/expansion.hpp"
#include "dissdoi/funcalc.hpp"

namespace dissdoi {

struct HistoryEntry {
  int level;      // truncation N at this checkpoint
  double norm;    // |value| at this checkpoint
  double change;  // |value - previous value|, -1 at the first checkpoint
};

struct DoiResult {
  ComplexMatrix value;                    // sum of the components
  std::vector<ComplexMatrix> components;  // one per expansion
  int n_used = 0;
  bool converged = false;
  std::string path;  // "schur-multiplier", "dense" or "mixed"
  std::vector<HistoryEntry> history;
};

struct DoiComponent {
  HaagerupExpansion expansion;
  Operand left;
  ComplexMatrix q;
  Operand right;
};

/// sum_n left_n(left) Q right_n(right). Uses the Schur-multiplier form in
/// eigenbases when both operands diagonalize, matrix closed forms otherwise.
/// Throws SeriesNotConverged when the stopping rule fails and
/// `series.require_convergence` is set.
DoiResult doi_apply(const HaagerupExpansion& x, const Operand& left, const ComplexMatrix& q, const Operand& right,
                    const SeriesOptions& series = {}, const CalculusOptions& opts = {});

/// Several expansions sharing one index schedule; the stopping rule watches
/// the total.
DoiResult doi_apply_sum(const std::vector<DoiComponent>& parts, const SeriesOptions& series = {},
                        const CalculusOptions& opts = {});

struct PerturbationReport {
  std::string formula;
  ComplexMatrix doi_value;
  ComplexMatrix direct_value;
  double residual = 0.0;     // |doi_value - direct_value|
  double certificate = 0.0;  // expansion certificate (largest over components)
  double bound = 0.0;        // sum over components of certificate * |Q|
  double s2_lhs = 0.0;       // Hilbert-Schmidt norm of the DOI value
  double s2_rhs = 0.0;       // sigma |f| sum of |Q|_2 over components
  DoiResult doi;
};

/// f(L) - f(M) as a double operator integral of the divided difference
/// against L - M, compared with the two calculus values.
PerturbationReport perturb_single(const ExpSum1D& f, const DissipativeMatrix& l, const DissipativeMatrix& m, int n,
                                  const SeriesOptions& series = {}, const CalculusOptions& opts = {});

/// vary_second: f(L1,M1) - f(L1,M2); vary_first: f(L1,M2) - f(L2,M2);
/// combined: f(L1,M1) - f(L2,M2) as the sum of both integrals.
enum class PairFormula { vary_second, vary_first, combined };

std::string_view to_string(PairFormula f);
PairFormula parse_pair_formula(std::string_view name);

PerturbationReport perturb_pair(const ExpSum2D& f, const CommutingDissipativePair& p1,
                                const CommutingDissipativePair& p2, PairFormula formula, int n,
                                const SeriesOptions& series = {}, const CalculusOptions& opts = {});

struct LipschitzReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double delta_first = 0.0;   // |L1 - L2|
  double delta_second = 0.0;  // |M1 - M2|
  bool ok = false;
};

/// |f(P1) - f(P2)| against (2/sqrt(pi)) sigma sum|c| (|L1-L2| + |M1-M2|).
LipschitzReport lipschitz_certificate(const ExpSum2D& f, const CommutingDissipativePair& p1,
                                      const CommutingDissipativePair& p2, double tol = 1e-10,
                                      const CalculusOptions& opts = {});

struct BandContribution {
  int n;
  double sigma;         // 2^{n+1}
  double upper;         // coefficient bound of the band
  double contribution;  // (2/sqrt(pi)) sigma upper (|dL| + |dM|)
};

struct BesovLipschitzReport {
  double lhs = 0.0;
  double rhs = 0.0;
  Complex constant{};
  std::vector<BandContribution> bands;
  bool ok = false;
};

BesovLipschitzReport besov_lipschitz(const ExpSum2D& f, const CommutingDissipativePair& p1,
                                     const CommutingDissipativePair& p2, double tol = 1e-10,
                                     const CalculusOptions& opts = {});

struct HolderSchattenReport {
  double alpha = 0.5;
  double p = 2.0;
  double lhs_op = 0.0;  // |f(P1) - f(P2)|
  double lhs_sp = 0.0;  // Schatten p/alpha norm of the same difference
  double holder_quantity = 0.0;     // max(|dL|^a, |dM|^a)
  double omega_quantity = 0.0;      // w_*(max(|dL|, |dM|))
  double schatten_quantity = 0.0;   // max(|dL|_{S_p}^a, |dM|_{S_p}^a)
  double ratio_holder = 0.0;
  double ratio_omega = 0.0;
  double ratio_schatten = 0.0;
};

/// Ratios only; no constant is asserted. Throws InvalidExponent unless
/// 0 < alpha < 1 and p > 1. The modulus defaults to t^alpha.
HolderSchattenReport holder_schatten_report(const ExpSum2D& f, const CommutingDissipativePair& p1,
                                            const CommutingDissipativePair& p2, double alpha, double p,
                                            const std::optional<Modulus>& modulus = std::nullopt,
                                            const CalculusOptions& opts = {});

}  // namespace dissdoi
