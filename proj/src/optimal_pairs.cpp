#include "framekit/optimal_pairs.hpp"

#include "framekit/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace framekit {

const char* to_string(MuBranch b) noexcept {
  return b == MuBranch::MuNonneg ? "MuNonneg" : "MuNeg";
}

PairBounds pair_bounds(const OperatorSpec& op, int n_vectors) {
  if (n_vectors < 1) throw FrameError(ErrorCode::InvalidArgument, "N must be positive");
  if (!op.positive_form()) {
    throw FrameError(ErrorCode::NotPSD, "K is not positive semi-definite");
  }
  const double n = n_vectors;
  const double tr = op.trace();
  const double tr2 = op.trace_sq();
  PairBounds b;
  b.o1_min = tr / n;
  b.r1_min = tr / n;
  b.mu = tr2 - tr * tr / n;
  b.branch = b.mu >= 0.0 ? MuBranch::MuNonneg : MuBranch::MuNeg;
  if (n_vectors >= 2) {
    const double pairs = n * (n - 1.0);
    if (b.branch == MuBranch::MuNonneg) {
      b.r2_min = tr / n + std::sqrt(b.mu / pairs);
    } else {
      b.r2_min = std::sqrt(std::max(0.0, (tr * tr - tr2) / pairs));
      const double alt = ((n - 2.0) * tr * tr + n * tr2) / (n * n * (n - 1.0));
      b.r2_min_statement_variant = std::sqrt(std::max(0.0, alt));
    }
  }
  return b;
}

bool is_o1_optimal_pair(const DualSystem& ds, double tol) {
  if (ds.kind() != DualKind::KDualPair) {
    throw FrameError(ErrorCode::NotPair, "system is not a K-dual pair");
  }
  const double target = ds.op().trace() / ds.size();
  const Matrix& f = ds.frame().synthesis();
  const Matrix& g = ds.dual().synthesis();
  for (int i = 0; i < ds.size(); ++i) {
    if (std::abs(f.col(i).norm() * g.col(i).norm() - target) > tol) return false;
  }
  return true;
}

bool is_r1_optimal_pair(const DualSystem& ds, double tol) {
  if (ds.kind() != DualKind::KDualPair) {
    throw FrameError(ErrorCode::NotPair, "system is not a K-dual pair");
  }
  return uniformity(ds, tol).c.has_value();
}

bool is_r2_optimal_pair(const DualSystem& ds, double tol) {
  if (ds.kind() != DualKind::KDualPair) {
    throw FrameError(ErrorCode::NotPair, "system is not a K-dual pair");
  }
  if (ds.size() < 2) return false;
  const auto u = uniformity(ds, tol);
  if (!u.c || !u.c_prime) return false;
  const auto b = pair_bounds(ds.op(), ds.size());
  return std::abs(r2_closed_form(ds).value - *b.r2_min) <= tol;
}

Frame uniform_parseval_frame(int n, int n_vectors) {
  if (n < 1 || n > n_vectors) {
    throw FrameError(ErrorCode::InvalidArgument,
                     "need 1 <= n <= N, got n = " + std::to_string(n) +
                         ", N = " + std::to_string(n_vectors));
  }
  const int big = n_vectors;
  Matrix m(n, big);
  int row = 0;
  const double unit = 1.0 / std::sqrt(static_cast<double>(big));
  const double pair = std::sqrt(2.0 / big);
  int pairs = 0;
  bool constant = false;
  bool alternating = false;
  if (n % 2 == 1) {
    constant = true;
    pairs = (n - 1) / 2;
  } else if (big % 2 == 1 || n <= big - 2) {
    pairs = n / 2;
  } else {
    constant = true;
    alternating = true;
    pairs = (n - 2) / 2;
  }
  if (constant) m.row(row++).setConstant(unit);
  if (alternating) {
    for (int t = 0; t < big; ++t) m(row, t) = (t % 2 == 0) ? unit : -unit;
    ++row;
  }
  for (int k = 1; k <= pairs; ++k) {
    for (int t = 0; t < big; ++t) {
      const double angle = 2.0 * std::numbers::pi * k * t / big;
      m(row, t) = pair * std::cos(angle);
      m(row + 1, t) = pair * std::sin(angle);
    }
    row += 2;
  }
  return Frame(std::move(m));
}

Frame construct_optimal_self_dual(const OperatorSpec& op, int n_vectors, double tol) {
  if (!op.psd()) throw FrameError(ErrorCode::NotPSD, "K is not positive semi-definite");
  const int n = op.dim();
  const int r = op.rank();
  if (n_vectors < 1 || n_vectors < r) {
    throw FrameError(ErrorCode::Infeasible,
                     "N = " + std::to_string(n_vectors) + " is below rank(K) = " + std::to_string(r));
  }
  if (r == 0) return Frame(Matrix::Zero(n, n_vectors));

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (op.matrix() + op.adjoint()));
  if (es.info() != Eigen::Success) {
    throw FrameError(ErrorCode::NumericalFailure, "symmetric eigensolver failed");
  }
  // Eigenvalues ascend, so the top r span range(K).
  const Matrix q = es.eigenvectors().rightCols(r);
  const Vector root = es.eigenvalues().tail(r).cwiseMax(0.0).cwiseSqrt();
  Matrix t = q * root.asDiagonal() * uniform_parseval_frame(r, n_vectors).synthesis();

  const double target = op.trace() / n_vectors;
  const double slack = tol * std::max(1.0, std::abs(target));
  for (int step = 0; step < n_vectors; ++step) {
    const Vector norms = t.colwise().squaredNorm();
    Eigen::Index hi = 0;
    Eigen::Index lo = 0;
    norms.maxCoeff(&hi);
    norms.minCoeff(&lo);
    if (norms(hi) - target <= slack && target - norms(lo) <= slack) break;
    const Vector a = t.col(hi);
    const Vector b = t.col(lo);
    // ||cos(th) a + sin(th) b||^2 moves from norms(hi) >= target to norms(lo) <= target.
    double left = 0.0;
    double right = std::numbers::pi / 2.0;
    for (int it = 0; it < 200 && right - left > 0.0; ++it) {
      const double mid = 0.5 * (left + right);
      if (mid == left || mid == right) break;
      const double val = (std::cos(mid) * a + std::sin(mid) * b).squaredNorm();
      if (val > target) left = mid; else right = mid;
    }
    const double th = 0.5 * (left + right);
    t.col(hi) = std::cos(th) * a + std::sin(th) * b;
    t.col(lo) = -std::sin(th) * a + std::cos(th) * b;
  }
  return Frame(std::move(t));
}

DualSystem unitary_transport(const DualSystem& ds, const Matrix& u, double tol) {
  const int n = ds.dim();
  if (u.rows() != n || u.cols() != n) {
    throw FrameError(ErrorCode::DimensionMismatch, "U must be n x n");
  }
  if ((u.transpose() * u - Matrix::Identity(n, n)).norm() > tol * n) {
    throw FrameError(ErrorCode::NotOrthogonal, "U^T U differs from the identity");
  }
  const Matrix& k = ds.op().matrix();
  if ((u * k - k * u).norm() > tol * std::max(1.0, ds.op().norm())) {
    throw FrameError(ErrorCode::DoesNotCommute, "U does not commute with K");
  }
  return make_dual_system(Frame(u * ds.frame().synthesis()), Frame(u * ds.dual().synthesis()),
                          ds.op());
}

}  // namespace framekit
