#include "framekit/linalg.hpp"

#include "framekit/error.hpp"

#include <algorithm>
#include <cmath>

namespace framekit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotKFrame: return "NotKFrame";
    case ErrorCode::NotParseval: return "NotParseval";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotPair: return "NotPair";
    case ErrorCode::NotDual: return "NotDual";
    case ErrorCode::NotOneUniform: return "NotOneUniform";
    case ErrorCode::NotTwoUniform: return "NotTwoUniform";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::DoesNotCommute: return "DoesNotCommute";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DependentInput: return "DependentInput";
    case ErrorCode::HypothesesNotMet: return "HypothesesNotMet";
    case ErrorCode::NoConnectedPairAvailable: return "NoConnectedPairAvailable";
    case ErrorCode::NotKInvariant: return "NotKInvariant";
    case ErrorCode::NoFreeDirections: return "NoFreeDirections";
    case ErrorCode::IterationCap: return "IterationCap";
    case ErrorCode::DofTooLarge: return "DofTooLarge";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

SvdParts full_svd(const Matrix& m) {
  if (m.size() == 0) {
    return {Matrix::Identity(m.rows(), m.rows()), Vector(0),
            Matrix::Identity(m.cols(), m.cols())};
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

namespace {

int count_above(const Vector& sigma, double tol) {
  if (sigma.size() == 0) return 0;
  const double cutoff = tol * sigma(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) ++r;
  }
  return r;
}

}  // namespace

int numeric_rank(const Matrix& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return count_above(svd.singularValues(), tol);
}

Matrix pseudo_inverse(const Matrix& m, double tol) {
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  if (m.size() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const int r = count_above(s, tol);
  for (int k = 0; k < r; ++k) {
    out.noalias() += (svd.matrixV().col(k) / s(k)) * svd.matrixU().col(k).transpose();
  }
  return out;
}

Matrix null_space(const Matrix& m, double tol) {
  const auto parts = full_svd(m);
  const int r = count_above(parts.sigma, tol);
  return parts.v.rightCols(m.cols() - r);
}

Matrix range_basis(const Matrix& m, double tol) {
  const auto parts = full_svd(m);
  const int r = count_above(parts.sigma, tol);
  return parts.u.leftCols(r);
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw FrameError(ErrorCode::NotSquare, "eigenvalues of a non-square matrix");
  }
  std::vector<std::complex<double>> out;
  if (m.size() == 0) return out;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw FrameError(ErrorCode::NumericalFailure, "eigenvalue iteration did not converge");
  }
  const auto& ev = solver.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  return out;
}

double spectral_radius(const Matrix& m) {
  double rho = 0.0;
  for (const auto& z : eigenvalues(m)) rho = std::max(rho, std::abs(z));
  return rho;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace framekit
