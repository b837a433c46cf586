#pragma once

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace dissdoi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Absolute-plus-relative tolerance: abs + rel * scale.
struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-10;

  double at(double scale) const { return abs + rel * scale; }
};

/// Eigen-decomposition of a square matrix with a right eigenvector basis.
struct SpectralData {
  std::vector<Complex> eigenvalues;
  ComplexMatrix right_basis;    // columns are unit eigenvectors
  ComplexMatrix inverse_basis;  // right_basis^{-1}
  double basis_condition = 1.0;
};

struct EigOptions {
  double condition_cap = 1e8;
};

/// Throws InvalidArgument unless `a` is square with finite entries.
void require_valid(const ComplexMatrix& a, const char* what = "matrix");

ComplexMatrix identity(Eigen::Index n);

/// Eigenvalues and eigenbasis; throws DefectiveMatrix when the basis
/// condition exceeds `opts.condition_cap`.
SpectralData eig(const ComplexMatrix& a, const EigOptions& opts = {});

/// Eigenvalues only (valid for defective matrices too).
std::vector<Complex> eigenvalues(const ComplexMatrix& a);

std::vector<double> singular_values(const ComplexMatrix& a);

/// Largest singular value.
double operator_norm(const ComplexMatrix& a);

/// (sum sigma_i^p)^(1/p); p = kInf gives the operator norm.
double schatten_norm(const ComplexMatrix& a, double p);

/// 2-norm condition number sigma_max / sigma_min (kInf when singular).
double condition_number(const ComplexMatrix& a);

struct SolveOptions {
  double condition_cap = 1e12;
  Tolerance tol{};
};

/// X with A X = B. Throws SingularMatrix when A is singular or its
/// condition exceeds the cap, or when the residual check fails.
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b,
                    const SolveOptions& opts = {});

/// A B - B A.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// V diag(values) V^{-1}.
ComplexMatrix from_spectral(const SpectralData& s, const std::vector<Complex>& values);

}  // namespace dissdoi
