#include "dissdoi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dissdoi/errors.hpp"

namespace dissdoi {

void require_valid(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream os;
    os << what << " must be square and non-empty, got " << a.rows() << "x" << a.cols();
    throw InvalidArgument(os.str());
  }
  if (!a.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

std::vector<double> singular_values(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

double schatten_norm(const ComplexMatrix& a, double p) {
  if (std::isnan(p) || p < 1.0) {
    std::ostringstream os;
    os << "Schatten exponent must be >= 1 or infinity, got " << p;
    throw InvalidExponent(os.str());
  }
  const auto s = singular_values(a);
  if (s.empty()) return 0.0;
  if (std::isinf(p)) return s.front();
  // Scale by the largest value so large p does not overflow.
  const double top = s.front();
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : s) acc += std::pow(v / top, p);
  return top * std::pow(acc, 1.0 / p);
}

double condition_number(const ComplexMatrix& a) {
  const auto s = singular_values(a);
  if (s.empty() || s.back() == 0.0) return kInf;
  return s.front() / s.back();
}

std::vector<Complex> eigenvalues(const ComplexMatrix& a) {
  require_valid(a);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/false);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

SpectralData eig(const ComplexMatrix& a, const EigOptions& opts) {
  require_valid(a);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a);
  if (es.info() != Eigen::Success) throw DefectiveMatrix("eigen solver did not converge");

  SpectralData out;
  out.right_basis = es.eigenvectors();
  for (Eigen::Index j = 0; j < out.right_basis.cols(); ++j) {
    const double nrm = out.right_basis.col(j).norm();
    if (nrm > 0.0) out.right_basis.col(j) /= nrm;
  }
  out.eigenvalues.assign(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  out.basis_condition = condition_number(out.right_basis);
  if (!(out.basis_condition <= opts.condition_cap)) {
    std::ostringstream os;
    os << "eigenbasis condition " << out.basis_condition << " exceeds cap " << opts.condition_cap;
    throw DefectiveMatrix(os.str());
  }
  out.inverse_basis = out.right_basis.partialPivLu().inverse();

  const double scale = std::max(1.0, operator_norm(a));
  ComplexMatrix lam = ComplexMatrix::Zero(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.rows(); ++j) lam(j, j) = out.eigenvalues[j];
  const double residual = operator_norm(a * out.right_basis - out.right_basis * lam);
  if (residual > 1e-9 * scale) {
    std::ostringstream os;
    os << "eigen reconstruction residual " << residual << " too large";
    throw DefectiveMatrix(os.str());
  }
  return out;
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b, const SolveOptions& opts) {
  require_valid(a, "coefficient matrix");
  if (b.rows() != a.rows()) throw InvalidArgument("solve: row mismatch");
  const double cond = condition_number(a);
  if (!(cond <= opts.condition_cap)) {
    std::ostringstream os;
    os << "condition number " << cond << " exceeds cap " << opts.condition_cap;
    throw SingularMatrix(os.str());
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  ComplexMatrix x = lu.solve(b);
  const double bnorm = operator_norm(b);
  const double residual = operator_norm(a * x - b);
  // Backward-stable LU: the residual is O(eps * cond) relative to |B|.
  if (residual > opts.tol.at(bnorm) + 1e-13 * cond * bnorm) {
    std::ostringstream os;
    os << "solve residual " << residual << " exceeds tolerance";
    throw SingularMatrix(os.str());
  }
  return x;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

ComplexMatrix from_spectral(const SpectralData& s, const std::vector<Complex>& values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  ComplexMatrix scaled = s.right_basis;
  for (Eigen::Index j = 0; j < n; ++j) scaled.col(j) *= values[j];
  return scaled * s.inverse_basis;
}

}  // namespace dissdoi
