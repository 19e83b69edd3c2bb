#pragma once

// Erasure error operators and worst-case error measures for a dual system.
// Indices in this API are 0-based; the CLI reports them 1-based.

#include "framekit/frame.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace framekit {

inline constexpr double kUniformTol = 1e-8;
inline constexpr std::uint64_t kPatternBudget = 1000000;

// Sorted, duplicate-free, nonempty set of erased indices.
class ErasurePattern {
 public:
  ErasurePattern(std::vector<int> indices, int n_vectors);

  const std::vector<int>& indices() const noexcept { return indices_; }
  int size() const noexcept { return static_cast<int>(indices_.size()); }

 private:
  std::vector<int> indices_;
};

// sum_{i in pattern} f_i g_i^T
Matrix error_operator(const DualSystem& ds, const ErasurePattern& pattern);

double op_norm_error(const DualSystem& ds, const ErasurePattern& pattern);
double spectral_radius_error(const DualSystem& ds, const ErasurePattern& pattern);

struct IndexValue {
  double value;
  int index;
};

struct PairValue {
  double value;
  int i;
  int j;
};

// max_i ||f_i|| ||g_i||
IndexValue o1(const DualSystem& ds);
// max_i |<f_i, g_i>|
IndexValue r1(const DualSystem& ds);

// Largest modulus of the nonzero eigenvalues of the 2x2 block
// [[a_ii, a_ij], [a_ji, a_jj]] for the given pair.
double two_erasure_radius(double aii, double ajj, double aij, double aji);

// Closed-form max over pairs i < j. Requires N >= 2.
PairValue r2_closed_form(const DualSystem& ds);

// For the same alpha-matrix formulas without building a DualSystem.
PairValue r2_from_cross_gram(const Matrix& alpha);

enum class ErrorMeasure { SpectralRadius, OperatorNorm };

struct BruteForceResult {
  double value;
  std::vector<int> argmax;
};

// Exhaustive max over all m-subsets; ties keep the lexicographically
// smallest pattern. Throws BudgetExceeded when C(N, m) > budget.
BruteForceResult rm_bruteforce(const DualSystem& ds, int m,
                               ErrorMeasure measure = ErrorMeasure::SpectralRadius,
                               std::uint64_t budget = kPatternBudget);

struct Uniformity {
  std::optional<double> c;
  std::optional<double> c_prime;
};

Uniformity uniformity(const DualSystem& ds, double tol = kUniformTol);

// max_{i != j} |tr(K)/N + sqrt(a_ij a_ji)| with the principal root.
// Throws NotOneUniform.
double r2_simplified_uniform(const DualSystem& ds, double tol = kUniformTol);

struct ErasureReport {
  double o1 = 0.0;
  double r1 = 0.0;
  std::optional<double> r2;
  int argmax_o1 = 0;
  int argmax_r1 = 0;
  std::optional<std::pair<int, int>> argmax_r2;
  std::optional<double> uniform1;
  std::optional<double> uniform2;
  std::map<int, double> rm;
};

ErasureReport erasure_report(const DualSystem& ds, double tol = kUniformTol);

std::uint64_t binomial(int n, int k);

}  // namespace framekit
