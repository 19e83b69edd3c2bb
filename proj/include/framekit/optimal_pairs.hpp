#pragma once

// Optimal K-dual pairs: lower bounds on the erasure measures over all pairs,
// optimality predicates, and an explicit self-dual pair attaining the bounds.

#include "framekit/erasure.hpp"
#include "framekit/frame.hpp"

#include <optional>

namespace framekit {

enum class MuBranch { MuNonneg, MuNeg };

const char* to_string(MuBranch b) noexcept;

struct PairBounds {
  double o1_min = 0.0;
  double r1_min = 0.0;
  double mu = 0.0;  // tr(K^2) - tr(K)^2 / N
  std::optional<double> r2_min;  // absent for N < 2
  MuBranch branch = MuBranch::MuNonneg;
  // sqrt(((N-2) tr(K)^2 + N tr(K^2)) / (N^2 (N-1))), the alternative mu < 0
  // expression; kept for comparison only.
  std::optional<double> r2_min_statement_variant;
};

// Requires <Kx, x> >= 0 for all x; throws NotPSD otherwise.
PairBounds pair_bounds(const OperatorSpec& op, int n_vectors);

bool is_o1_optimal_pair(const DualSystem& ds, double tol = kUniformTol);
bool is_r1_optimal_pair(const DualSystem& ds, double tol = kUniformTol);
bool is_r2_optimal_pair(const DualSystem& ds, double tol = kUniformTol);

// Harmonic (real DFT) Parseval frame of N vectors in R^n with
// ||f_i||^2 = n / N for every i.
Frame uniform_parseval_frame(int n, int n_vectors);

// T with T T^T = K and ||t_i||^2 = tr(K)/N, so (T, T) is an optimal K-dual
// pair for one erasure.
Frame construct_optimal_self_dual(const OperatorSpec& op, int n_vectors,
                                  double tol = kDefaultTol);

// (UF, UG) for an orthogonal U commuting with K.
DualSystem unitary_transport(const DualSystem& ds, const Matrix& u, double tol = kDefaultTol);

}  // namespace framekit
