#pragma once

// Small dense real linear-algebra helpers shared by every module.
// Rank decisions threshold singular values at tol * sigma_max.

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace framekit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;

struct SvdParts {
  Matrix u;
  Vector sigma;
  Matrix v;
};

SvdParts full_svd(const Matrix& m);

int numeric_rank(const Matrix& m, double tol = kDefaultTol);

Matrix pseudo_inverse(const Matrix& m, double tol = kDefaultTol);

// Orthonormal basis (columns) of the null space of m.
Matrix null_space(const Matrix& m, double tol = kDefaultTol);

// Orthonormal basis (columns) of the column space of m.
Matrix range_basis(const Matrix& m, double tol = kDefaultTol);

// Eigenvalues of a general square matrix; throws NumericalFailure when the
// solver does not converge.
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

double spectral_radius(const Matrix& m);

double operator_norm(const Matrix& m);

bool all_finite(const Matrix& m);

}  // namespace framekit
