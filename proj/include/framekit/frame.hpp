#pragma once

// Frame and operator object model: frames, the operator K with its cached
// derived quantities, K-dual systems and the affine space of all K-duals.

#include "framekit/linalg.hpp"

#include <optional>
#include <vector>

namespace framekit {

// Tolerance used for duality / Parseval residual checks (relative, Frobenius).
inline constexpr double kDualTol = 1e-9;

// An ordered sequence of N vectors in R^n, stored as the n x N synthesis
// matrix whose i-th column is f_i. Immutable.
class Frame {
 public:
  explicit Frame(Matrix synthesis);

  int dim() const noexcept { return static_cast<int>(synthesis_.rows()); }
  int size() const noexcept { return static_cast<int>(synthesis_.cols()); }

  const Matrix& synthesis() const noexcept { return synthesis_; }
  Vector vector(int i) const;
  std::vector<std::vector<double>> vectors() const;

 private:
  Matrix synthesis_;
};

Frame build_frame(const std::vector<std::vector<double>>& vectors);

class OperatorSpec {
 public:
  const Matrix& matrix() const noexcept { return matrix_; }
  const Matrix& adjoint() const noexcept { return adjoint_; }
  const Matrix& pinv() const noexcept { return pinv_; }
  // Present only when psd() holds.
  const std::optional<Matrix>& sqrt() const noexcept { return sqrt_; }
  double trace() const noexcept { return trace_; }
  double trace_sq() const noexcept { return trace_sq_; }
  // Symmetric within tol and all eigenvalues >= -tol * ||K||.
  bool psd() const noexcept { return psd_; }
  // <Kx, x> >= 0 for all x, i.e. the symmetric part is PSD. Implied by psd().
  bool positive_form() const noexcept { return positive_form_; }
  bool symmetric() const noexcept { return symmetric_; }
  int rank() const noexcept { return rank_; }
  double tol() const noexcept { return tol_; }
  double norm() const noexcept { return norm_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }

 private:
  friend OperatorSpec build_operator(const Matrix& k, double tol);
  OperatorSpec() = default;

  Matrix matrix_;
  Matrix adjoint_;
  Matrix pinv_;
  std::optional<Matrix> sqrt_;
  double trace_ = 0.0;
  double trace_sq_ = 0.0;
  double norm_ = 0.0;
  bool psd_ = false;
  bool positive_form_ = false;
  bool symmetric_ = false;
  int rank_ = 0;
  double tol_ = kDefaultTol;
};

OperatorSpec build_operator(const Matrix& k, double tol = kDefaultTol);

// S_F = synthesis * synthesis^T.
Matrix frame_operator(const Frame& f);

struct KFrameBounds {
  double lower;  // A; +inf when K = 0
  double upper;  // B
};

// Optimal bounds in A||K^T f||^2 <= sum |<f, f_i>|^2 <= B ||f||^2, or nullopt
// when no positive lower bound exists.
std::optional<KFrameBounds> k_frame_bounds(const Frame& f, const OperatorSpec& op,
                                           double tol = kDefaultTol);

bool is_parseval_k_frame(const Frame& f, const OperatorSpec& op, double tol = kDualTol);

// {K^dagger f_i}; requires a Parseval K-frame.
Frame canonical_k_dual(const Frame& f, const OperatorSpec& op);

// {K^T S_F^+ f_i}: a K-dual of any K-frame, equal to the canonical K-dual when
// F is Parseval.
Frame standard_k_dual(const Frame& f, const OperatorSpec& op);

enum class DualKind { NotDual, KDualOnly, KDualPair };

const char* to_string(DualKind kind) noexcept;

DualKind verify_k_dual(const Frame& f, const Frame& g, const OperatorSpec& op,
                       double tol = kDualTol);

// A frame F together with a K-dual G and the cross-Gram matrix
// alpha_ij = <g_i, f_j>.
class DualSystem {
 public:
  const Frame& frame() const noexcept { return frame_; }
  const Frame& dual() const noexcept { return dual_; }
  const OperatorSpec& op() const noexcept { return op_; }
  const Matrix& cross_gram() const noexcept { return cross_gram_; }
  DualKind kind() const noexcept { return kind_; }
  int size() const noexcept { return frame_.size(); }
  int dim() const noexcept { return frame_.dim(); }

 private:
  friend DualSystem make_dual_system(Frame, Frame, OperatorSpec, double);
  DualSystem(Frame f, Frame g, OperatorSpec op, Matrix alpha, DualKind kind)
      : frame_(std::move(f)), dual_(std::move(g)), op_(std::move(op)),
        cross_gram_(std::move(alpha)), kind_(kind) {}

  Frame frame_;
  Frame dual_;
  OperatorSpec op_;
  Matrix cross_gram_;
  DualKind kind_;
};

// Throws NotDual when G is not a K-dual of F.
DualSystem make_dual_system(Frame f, Frame g, OperatorSpec op, double tol = kDualTol);

// alpha_ij = <g_i, f_j>.
Matrix cross_gram(const Frame& f, const Frame& g);

// Every K-dual of a Parseval K-frame is base + U with F U^T = 0. The basis is
// orthonormal under the entrywise inner product.
struct DualParameterization {
  Frame base;
  std::vector<Matrix> basis;
  int dof = 0;
};

DualParameterization dual_parameterization(const Frame& f, const OperatorSpec& op,
                                           double tol = kDefaultTol);

Frame reconstruct_dual(const DualParameterization& param, const Vector& coefficients);

}  // namespace framekit
