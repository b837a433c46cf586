#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "dissdoi/linalg.hpp"

namespace dissdoi {

struct DissipativityCheck {
  double certified_margin;  // min eigenvalue of (A - A*)/(2i)
  bool dissipative;
};

/// Smallest eigenvalue of the imaginary part (A - A*)/(2i) compared with -tol.
DissipativityCheck is_dissipative(const ComplexMatrix& a, double tol = 1e-10);

/// A matrix whose imaginary part has been certified positive semidefinite
/// (up to tolerance). Immutable once built.
class DissipativeMatrix {
 public:
  /// Throws NotDissipative when the margin is below -tol.
  static DissipativeMatrix certify(ComplexMatrix a, double tol = 1e-10);

  const ComplexMatrix& matrix() const { return a_; }
  double certified_margin() const { return margin_; }
  Eigen::Index dim() const { return a_.rows(); }

 private:
  DissipativeMatrix(ComplexMatrix a, double margin) : a_(std::move(a)), margin_(margin) {}

  ComplexMatrix a_;
  double margin_;
};

/// Two dissipative matrices that commute, with the measured residuals.
class CommutingDissipativePair {
 public:
  const DissipativeMatrix& first() const { return l_; }
  const DissipativeMatrix& second() const { return m_; }
  double commutator_residual() const { return commutator_; }
  double resolvent_residual() const { return resolvent_; }
  double cayley_residual() const { return cayley_; }
  Eigen::Index dim() const { return l_.dim(); }

 private:
  friend CommutingDissipativePair check_commuting(const DissipativeMatrix&, const DissipativeMatrix&,
                                                  double);
  CommutingDissipativePair(DissipativeMatrix l, DissipativeMatrix m, double c, double r, double t)
      : l_(std::move(l)), m_(std::move(m)), commutator_(c), resolvent_(r), cayley_(t) {}

  DissipativeMatrix l_;
  DissipativeMatrix m_;
  double commutator_;
  double resolvent_;
  double cayley_;
};

struct CommutationResiduals {
  double commutator;  // |LM - ML| / (|L||M|)
  double resolvent;   // same for (L+iI)^{-1}, (M+iI)^{-1}
  double cayley;      // same for the Cayley transforms
};

/// Relative commutator residuals of the three equivalent formulations.
CommutationResiduals commutation_residuals(const DissipativeMatrix& l, const DissipativeMatrix& m);

/// Throws NotCommuting (with every residual in the message) unless all
/// three relative residuals are at most `tol`.
CommutingDissipativePair check_commuting(const DissipativeMatrix& l, const DissipativeMatrix& m,
                                         double tol = 1e-10);

struct CayleyOptions {
  double condition_cap = 1e10;
  double tol = 1e-10;
};

/// T = (L - iI)(L + iI)^{-1}; a contraction without eigenvalue 1.
ComplexMatrix cayley(const DissipativeMatrix& l, const CayleyOptions& opts = {});

/// L = i(I + T)(I - T)^{-1}. Throws UnitEigenvalueAtOne when I - T is
/// numerically singular and InvalidArgument when |T| > 1 + tol.
DissipativeMatrix inverse_cayley(const ComplexMatrix& t, const CayleyOptions& opts = {});

/// |iota(L) - iota(M) - (I - iL)^{-1}(L - M)(I - iM)^{-1}| with iota(z) = z(1 - iz)^{-1}.
double resolvent_identity_check(const DissipativeMatrix& l, const DissipativeMatrix& m);

/// (I - i X)^{-1}, always invertible for dissipative X.
ComplexMatrix shifted_resolvent(const DissipativeMatrix& x);

enum class GenStyle { normal, nilpotent_shift, polynomial };

std::string_view to_string(GenStyle style);
GenStyle parse_gen_style(std::string_view name);

struct GenOptions {
  GenStyle style = GenStyle::normal;
  double spread = 0.1;  // size of the perturbation between the two pairs
  double offset = 0.1;  // extra imaginary shift beyond |A|
  double scale = 1.0;   // norm scale of the commuting sources
};

struct GeneratedInstance {
  CommutingDissipativePair first;
  CommutingDissipativePair second;
  std::uint64_t seed;
  GenStyle style;
};

/// Two commuting dissipative pairs, deterministic in (seed, dim, options).
/// L = A + i c1 I, M = B + i c2 I with c >= |A| + offset and A, B commuting
/// by construction.
GeneratedInstance gen_pair(std::uint64_t seed, int dim, const GenOptions& opts = {});

}  // namespace dissdoi
