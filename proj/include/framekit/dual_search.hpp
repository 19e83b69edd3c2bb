#pragma once

// Numerical minimization of erasure measures over the affine space of all
// K-duals of a fixed Parseval K-frame. Used as an independent check of the
// closed-form results.

#include "framekit/frame.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace framekit {

struct SearchConfig {
  int max_iters = 5000;
  double step_init = 0.1;
  double tol_value = 1e-8;
  int restarts = 8;
  std::uint64_t seed = 0;
  int grid_points_per_dof = 11;
  int dof_cap_for_grid = 4;
  // Known optimal value; switches the step rule to the plain Polyak step.
  std::optional<double> target;
};

enum class SearchMeasure { O1, R1 };

const char* to_string(SearchMeasure m) noexcept;

struct SearchResult {
  Frame dual;
  double value;
  Vector coefficients;
  // Best value after each iteration of the winning restart.
  std::vector<double> trace;
  int restart = 0;
};

SearchResult minimize_measure(const Frame& f, const OperatorSpec& op, SearchMeasure kind,
                              const SearchConfig& cfg = {});

// Minimizes r2 over duals with <g_i, f_i> = tr(K)/N for all i.
// Throws Infeasible when no such dual exists.
SearchResult minimize_r2_within_uniform(const Frame& f, const OperatorSpec& op,
                                        const SearchConfig& cfg = {});

struct GridResult {
  double value;
  Vector argmin;
  // Grid points whose value is within 1e-12 of the minimum.
  int attained = 0;
};

// Exhaustive grid over [-1, 1]^dof scaled by ||K^dagger F||. An explicit
// perturbation basis may replace the orthonormal parameterization.
GridResult brute_force_grid_oracle(const Frame& f, const OperatorSpec& op, SearchMeasure kind,
                                   const SearchConfig& cfg = {},
                                   const std::vector<Matrix>* basis = nullptr);

double measure_value(const Frame& f, const Frame& g, SearchMeasure kind);

}  // namespace framekit
