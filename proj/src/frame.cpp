#include "framekit/frame.hpp"

#include "framekit/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace framekit {

namespace {

double scale_of(double x) { return std::max(1.0, x); }

Eigen::SelfAdjointEigenSolver<Matrix> symmetric_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw FrameError(ErrorCode::NumericalFailure, "symmetric eigensolver failed");
  }
  return es;
}

void require_compatible(const Frame& f, const OperatorSpec& op) {
  if (f.dim() != op.dim()) {
    throw FrameError(ErrorCode::DimensionMismatch,
                     "frame lives in R^" + std::to_string(f.dim()) + " but K is " +
                         std::to_string(op.dim()) + "x" + std::to_string(op.dim()));
  }
}

}  // namespace

Frame::Frame(Matrix synthesis) : synthesis_(std::move(synthesis)) {
  if (synthesis_.rows() == 0 || synthesis_.cols() == 0) {
    throw FrameError(ErrorCode::EmptyInput, "a frame needs at least one vector of positive dimension");
  }
  if (!all_finite(synthesis_)) {
    throw FrameError(ErrorCode::NonFinite, "frame vectors contain NaN or Inf");
  }
}

Vector Frame::vector(int i) const {
  if (i < 0 || i >= size()) {
    throw FrameError(ErrorCode::IndexOutOfRange, "vector index " + std::to_string(i));
  }
  return synthesis_.col(i);
}

std::vector<std::vector<double>> Frame::vectors() const {
  std::vector<std::vector<double>> out(size(), std::vector<double>(dim()));
  for (int i = 0; i < size(); ++i) {
    for (int r = 0; r < dim(); ++r) out[i][r] = synthesis_(r, i);
  }
  return out;
}

Frame build_frame(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty() || vectors.front().empty()) {
    throw FrameError(ErrorCode::EmptyInput, "no vectors given");
  }
  const auto n = vectors.front().size();
  Matrix m(n, vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != n) {
      throw FrameError(ErrorCode::DimensionMismatch,
                       "vector " + std::to_string(i + 1) + " has length " +
                           std::to_string(vectors[i].size()) + ", expected " + std::to_string(n));
    }
    for (std::size_t r = 0; r < n; ++r) m(r, i) = vectors[i][r];
  }
  return Frame(std::move(m));
}

OperatorSpec build_operator(const Matrix& k, double tol) {
  if (k.size() == 0) throw FrameError(ErrorCode::EmptyInput, "K is empty");
  if (k.rows() != k.cols()) {
    throw FrameError(ErrorCode::NotSquare, "K must be square");
  }
  if (!all_finite(k)) throw FrameError(ErrorCode::NonFinite, "K contains NaN or Inf");

  OperatorSpec op;
  op.matrix_ = k;
  op.adjoint_ = k.transpose();
  op.tol_ = tol;
  op.norm_ = operator_norm(k);
  op.pinv_ = pseudo_inverse(k, tol);
  op.rank_ = numeric_rank(k, tol);
  op.trace_ = k.trace();
  op.trace_sq_ = (k * k).trace();

  const double scale = scale_of(op.norm_);
  op.symmetric_ = (k - op.adjoint_).norm() <= tol * scale;
  const Matrix sym = 0.5 * (k + op.adjoint_);
  const auto es = symmetric_eig(sym);
  op.positive_form_ = es.eigenvalues().minCoeff() >= -tol * scale;
  op.psd_ = op.symmetric_ && op.positive_form_;
  if (op.psd_) {
    const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    op.sqrt_ = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  }
  return op;
}

Matrix frame_operator(const Frame& f) { return f.synthesis() * f.synthesis().transpose(); }

std::optional<KFrameBounds> k_frame_bounds(const Frame& f, const OperatorSpec& op, double tol) {
  require_compatible(f, op);
  const Matrix s = frame_operator(f);
  const auto es = symmetric_eig(s);
  const Vector& lam = es.eigenvalues();
  const double upper = std::max(0.0, lam.maxCoeff());

  const Matrix m = op.matrix() * op.adjoint();
  if (m.norm() <= tol * tol) {
    return KFrameBounds{std::numeric_limits<double>::infinity(), upper};
  }
  if (upper <= 0.0) return std::nullopt;

  // A = 1 / lambda_max(S^{+1/2} K K^T S^{+1/2}) provided range(K) lies in range(S).
  const double cutoff = tol * upper;
  Vector inv_root = Vector::Zero(lam.size());
  Matrix null_proj = Matrix::Zero(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const Vector v = es.eigenvectors().col(i);
    if (lam(i) > cutoff) {
      inv_root(i) = 1.0 / std::sqrt(lam(i));
    } else {
      null_proj += v * v.transpose();
    }
  }
  const double kscale = scale_of(op.norm());
  if ((op.adjoint() * null_proj).norm() > std::sqrt(tol) * kscale) return std::nullopt;

  const Matrix root_pinv = es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
  const Matrix w = root_pinv * m * root_pinv;
  const double top = symmetric_eig(0.5 * (w + w.transpose())).eigenvalues().maxCoeff();
  if (top <= 0.0) return std::nullopt;
  const double lower = 1.0 / top;
  if (lower <= tol) return std::nullopt;
  return KFrameBounds{lower, upper};
}

bool is_parseval_k_frame(const Frame& f, const OperatorSpec& op, double tol) {
  require_compatible(f, op);
  const Matrix kk = op.matrix() * op.adjoint();
  return (frame_operator(f) - kk).norm() <= tol * scale_of(kk.norm());
}

Frame canonical_k_dual(const Frame& f, const OperatorSpec& op) {
  if (!is_parseval_k_frame(f, op)) {
    throw FrameError(ErrorCode::NotParseval, "S_F differs from K K^T");
  }
  return Frame(op.pinv() * f.synthesis());
}

Frame standard_k_dual(const Frame& f, const OperatorSpec& op) {
  if (!k_frame_bounds(f, op, op.tol())) {
    throw FrameError(ErrorCode::NotKFrame, "no positive lower K-frame bound");
  }
  // S^+ F = (F^+)^T; going through F keeps the conditioning of F instead of
  // its square.
  const Matrix f_pinv = pseudo_inverse(f.synthesis(), op.tol());
  return Frame(op.adjoint() * f_pinv.transpose());
}

const char* to_string(DualKind kind) noexcept {
  switch (kind) {
    case DualKind::NotDual: return "NotDual";
    case DualKind::KDualOnly: return "KDualOnly";
    case DualKind::KDualPair: return "KDualPair";
  }
  return "Unknown";
}

DualKind verify_k_dual(const Frame& f, const Frame& g, const OperatorSpec& op, double tol) {
  require_compatible(f, op);
  if (g.dim() != f.dim() || g.size() != f.size()) {
    throw FrameError(ErrorCode::DimensionMismatch, "frame and dual have different shapes");
  }
  const double scale = scale_of(op.matrix().norm());
  const Matrix fg = f.synthesis() * g.synthesis().transpose();
  if ((fg - op.matrix()).norm() > tol * scale) return DualKind::NotDual;
  // (F G^T)^T = G F^T, so the reverse identity is automatic over the reals.
  if ((fg.transpose() - op.adjoint()).norm() > tol * scale) return DualKind::KDualOnly;
  return DualKind::KDualPair;
}

Matrix cross_gram(const Frame& f, const Frame& g) {
  return g.synthesis().transpose() * f.synthesis();
}

DualSystem make_dual_system(Frame f, Frame g, OperatorSpec op, double tol) {
  const DualKind kind = verify_k_dual(f, g, op, tol);
  if (kind == DualKind::NotDual) {
    throw FrameError(ErrorCode::NotDual, "F G^T does not reproduce K");
  }
  Matrix alpha = cross_gram(f, g);
  return DualSystem(std::move(f), std::move(g), std::move(op), std::move(alpha), kind);
}

DualParameterization dual_parameterization(const Frame& f, const OperatorSpec& op, double tol) {
  DualParameterization out{canonical_k_dual(f, op), {}, 0};
  const Matrix w = null_space(f.synthesis(), tol);
  const int n = f.dim();
  out.basis.reserve(static_cast<std::size_t>(w.cols()) * n);
  for (Eigen::Index b = 0; b < w.cols(); ++b) {
    for (int a = 0; a < n; ++a) {
      Matrix e = Matrix::Zero(n, f.size());
      e.row(a) = w.col(b).transpose();
      out.basis.push_back(std::move(e));
    }
  }
  out.dof = static_cast<int>(out.basis.size());
  return out;
}

Frame reconstruct_dual(const DualParameterization& param, const Vector& coefficients) {
  if (coefficients.size() != param.dof) {
    throw FrameError(ErrorCode::DimensionMismatch,
                     "expected " + std::to_string(param.dof) + " coefficients, got " +
                         std::to_string(coefficients.size()));
  }
  Matrix g = param.base.synthesis();
  for (int k = 0; k < param.dof; ++k) g += coefficients(k) * param.basis[k];
  return Frame(std::move(g));
}

}  // namespace framekit
