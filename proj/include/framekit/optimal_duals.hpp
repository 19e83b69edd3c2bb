#pragma once

// Optimal K-duals of a fixed Parseval K-frame for one and two erasures:
// optimality certificates for the canonical dual, the orthogonal
// linearly-connected decomposition, and explicit spectrally optimal duals.

#include "framekit/dual_search.hpp"
#include "framekit/erasure.hpp"
#include "framekit/frame.hpp"

#include <optional>
#include <string>
#include <vector>

namespace framekit {

inline constexpr double kWeightTol = 1e-8;
inline constexpr int kSubsetSearchCap = 16;

enum class MeasureKind { OpNorm, Spectral };

const char* to_string(MeasureKind k) noexcept;

struct WeightPartition {
  MeasureKind kind;
  Vector weights;  // ||f_i|| ||K^+ f_i||  or  <K^+ f_i, f_i>
  double top_value;
  std::vector<int> top;
  std::vector<int> rest;
  Matrix span_top;   // orthonormal columns
  Matrix span_rest;  // orthonormal columns
};

WeightPartition weight_partition(const Frame& f, const OperatorSpec& op, MeasureKind kind,
                                 double tol = kWeightTol);

bool spans_intersect_trivially(const WeightPartition& part, double tol = kDefaultTol);

// h of minimum norm with <v_i, h> = alpha for each column v_i.
Vector solve_equal_inner_products(const Matrix& vectors, double alpha, double tol = kDefaultTol);

struct PerturbationFamily {
  bool exists = false;
  Matrix direction;  // n x N, unit Frobenius norm
  double radius = 0.0;  // +inf when no constrained index moves
};

// A line K^+F + tU of duals that keep the canonical value for |t| < radius.
PerturbationFamily perturbation_family(const Frame& f, const OperatorSpec& op, MeasureKind kind,
                                       double tol = kWeightTol);

enum class Verdict {
  OptimalSufficient,
  OptimalUncountableFamily,
  UniqueOptimal,
  NotOptimal,
  Undetermined,
};

const char* to_string(Verdict v) noexcept;

struct CertificateEvidence {
  std::string hypothesis;
  bool spans_trivial = false;
  bool top_independent = false;
  bool rest_independent = false;
  double canonical_value = 0.0;
  std::optional<PerturbationFamily> family;
  // NotOptimal witness: null-space coefficients c, vector h and a step t with
  // K^+F + t (c_i h)_i strictly better than the canonical dual.
  std::optional<Vector> dependence;
  std::optional<Vector> h;
  std::optional<double> step;
  std::optional<double> improved_value;
  // Undetermined: numerical minimum found by dual search.
  std::optional<double> numeric_value;
};

struct OptimalityCertificate {
  Verdict verdict;
  CertificateEvidence evidence;
};

OptimalityCertificate canonical_certificate(const Frame& f, const OperatorSpec& op,
                                            MeasureKind kind, double tol = kWeightTol,
                                            const SearchConfig& fallback = {});

struct Connection {
  double c;                  // coefficient on f_j
  std::vector<int> others;   // l_1 .. l_m
  std::vector<double> coefs; // c_1 .. c_m
};

// f_i = c f_j + sum c_k f_{l_k} with {f_j, f_l} independent and every
// coefficient nonzero. Candidates default to all indices other than i, j.
std::optional<Connection> is_linearly_connected_pair(
    const Frame& f, int i, int j, double tol = 1e-9,
    const std::vector<int>* candidates = nullptr, int cap = kSubsetSearchCap);

struct ConnectedBlock {
  std::vector<int> indices;
  Matrix basis;  // orthonormal basis of the block span
  bool k_invariant = false;
  double delta = 0.0;  // tr(K restricted to the span) / block size
  bool connected = false;
  std::string diagnostic;
};

struct ConnectedDecomposition {
  std::vector<ConnectedBlock> blocks;
};

ConnectedDecomposition connected_decomposition(const Frame& f, const OperatorSpec& op,
                                               double tol = 1e-9, int cap = kSubsetSearchCap);

struct MinR1 {
  double value;
  bool closed_form;
  std::string warning;
};

// Minimum of r1 over all K-duals: max of the block deltas when every block is
// K-invariant and connected, otherwise the dual search value.
MinR1 min_r1_fixed_frame(const Frame& f, const OperatorSpec& op, double tol = 1e-9,
                         const SearchConfig& fallback = {});

// One step raising the number of indices with <g_i, f_i> = target. Restricted
// to `indices` (all indices by default; target defaults to tr(K)/N).
Frame improve_dual_step(const Frame& f, const Frame& g, const OperatorSpec& op,
                        double tol = kWeightTol, const std::vector<int>* indices = nullptr,
                        std::optional<double> target = std::nullopt);

Frame construct_spectrally_optimal_dual(const Frame& f, const OperatorSpec& op, double tol = 1e-9);

// Requires <g_i, f_i> >= 0 and a constant off-diagonal product.
double r2_special_closed_form(const DualSystem& ds, double tol = kUniformTol);

struct TwoUniformOptimality {
  bool optimal;
  double r2_value;
  double c;
  // Same expression with tr(K) in place of tr(K^2); comparison only.
  double c_trace_variant;
};

TwoUniformOptimality two_uniform_spectral_optimality(const Frame& f, const Frame& g,
                                                     const OperatorSpec& op,
                                                     double tol = kUniformTol);

}  // namespace framekit
