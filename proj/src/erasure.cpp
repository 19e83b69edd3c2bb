#include "framekit/erasure.hpp"

#include "framekit/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace framekit {

ErasurePattern::ErasurePattern(std::vector<int> indices, int n_vectors)
    : indices_(std::move(indices)) {
  if (indices_.empty()) throw FrameError(ErrorCode::EmptyInput, "erasure pattern is empty");
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw FrameError(ErrorCode::InvalidArgument, "erasure pattern repeats an index");
  }
  if (indices_.front() < 0 || indices_.back() >= n_vectors) {
    throw FrameError(ErrorCode::IndexOutOfRange,
                     "erasure index outside 1.." + std::to_string(n_vectors));
  }
}

namespace {

void check_pattern(const DualSystem& ds, const ErasurePattern& p) {
  if (p.indices().back() >= ds.size()) {
    throw FrameError(ErrorCode::IndexOutOfRange, "pattern built for a larger frame");
  }
}

// Visit all m-subsets of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(int n, int m, Fn&& fn) {
  std::vector<int> idx(m);
  for (int k = 0; k < m; ++k) idx[k] = k;
  while (true) {
    fn(idx);
    int k = m - 1;
    while (k >= 0 && idx[k] == n - m + k) --k;
    if (k < 0) return;
    ++idx[k];
    for (int t = k + 1; t < m; ++t) idx[t] = idx[t - 1] + 1;
  }
}

}  // namespace

Matrix error_operator(const DualSystem& ds, const ErasurePattern& pattern) {
  check_pattern(ds, pattern);
  const Matrix& f = ds.frame().synthesis();
  const Matrix& g = ds.dual().synthesis();
  Matrix e = Matrix::Zero(ds.dim(), ds.dim());
  for (int i : pattern.indices()) e.noalias() += f.col(i) * g.col(i).transpose();
  return e;
}

double op_norm_error(const DualSystem& ds, const ErasurePattern& pattern) {
  return operator_norm(error_operator(ds, pattern));
}

double spectral_radius_error(const DualSystem& ds, const ErasurePattern& pattern) {
  return spectral_radius(error_operator(ds, pattern));
}

namespace {

// Values within rounding of the running maximum count as ties, so the
// reported argmax stays the first one in index order.
bool beats(double v, double best) { return v > best + 1e-12 * std::max(1.0, std::abs(best)); }

}  // namespace

IndexValue o1(const DualSystem& ds) {
  const Matrix& f = ds.frame().synthesis();
  const Matrix& g = ds.dual().synthesis();
  IndexValue best{-1.0, 0};
  for (int i = 0; i < ds.size(); ++i) {
    const double v = f.col(i).norm() * g.col(i).norm();
    if (beats(v, best.value)) {
      best = {v, i};
    } else {
      best.value = std::max(best.value, v);
    }
  }
  return best;
}

IndexValue r1(const DualSystem& ds) {
  const Matrix& a = ds.cross_gram();
  IndexValue best{-1.0, 0};
  for (int i = 0; i < ds.size(); ++i) {
    const double v = std::abs(a(i, i));
    if (beats(v, best.value)) {
      best = {v, i};
    } else {
      best.value = std::max(best.value, v);
    }
  }
  return best;
}

double two_erasure_radius(double aii, double ajj, double aij, double aji) {
  const std::complex<double> disc((aii - ajj) * (aii - ajj) + 4.0 * aij * aji, 0.0);
  const std::complex<double> root = std::sqrt(disc);
  const double s = aii + ajj;
  return std::max(std::abs((s + root) / 2.0), std::abs((s - root) / 2.0));
}

PairValue r2_from_cross_gram(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  if (n < 2) throw FrameError(ErrorCode::InvalidArgument, "two erasures need N >= 2");
  PairValue best{-1.0, 0, 1};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = two_erasure_radius(a(i, i), a(j, j), a(i, j), a(j, i));
      if (beats(v, best.value)) {
        best = {v, i, j};
      } else {
        best.value = std::max(best.value, v);
      }
    }
  }
  return best;
}

PairValue r2_closed_form(const DualSystem& ds) { return r2_from_cross_gram(ds.cross_gram()); }

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (out > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    out = out * num / static_cast<std::uint64_t>(i);
  }
  return out;
}

BruteForceResult rm_bruteforce(const DualSystem& ds, int m, ErrorMeasure measure,
                               std::uint64_t budget) {
  const int n = ds.size();
  if (m < 1 || m > n) {
    throw FrameError(ErrorCode::InvalidArgument,
                     "pattern size must lie in 1.." + std::to_string(n));
  }
  const std::uint64_t count = binomial(n, m);
  if (count > budget) {
    throw FrameError(ErrorCode::BudgetExceeded,
                     std::to_string(count) + " patterns exceed the budget of " +
                         std::to_string(budget));
  }
  const Matrix& f = ds.frame().synthesis();
  const Matrix& g = ds.dual().synthesis();
  BruteForceResult best{-1.0, {}};
  Matrix e(ds.dim(), ds.dim());
  for_each_subset(n, m, [&](const std::vector<int>& idx) {
    e.setZero();
    for (int i : idx) e.noalias() += f.col(i) * g.col(i).transpose();
    const double v =
        measure == ErrorMeasure::SpectralRadius ? spectral_radius(e) : operator_norm(e);
    if (beats(v, best.value)) {
      best = {v, idx};
    } else {
      best.value = std::max(best.value, v);
    }
  });
  return best;
}

Uniformity uniformity(const DualSystem& ds, double tol) {
  const Matrix& a = ds.cross_gram();
  const int n = ds.size();
  Uniformity out;
  const Vector d = a.diagonal();
  if (d.maxCoeff() - d.minCoeff() > tol) return out;
  const double c = d.mean();
  if (std::abs(c - ds.op().trace() / n) > tol) {
    throw FrameError(ErrorCode::NumericalFailure,
                     "constant diagonal differs from tr(K)/N; the dual relation is violated");
  }
  out.c = c;
  if (n < 2) return out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = a(i, j) * a(j, i);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      sum += p;
    }
  }
  if (hi - lo <= tol) out.c_prime = sum / (0.5 * n * (n - 1));
  return out;
}

double r2_simplified_uniform(const DualSystem& ds, double tol) {
  const auto u = uniformity(ds, tol);
  if (!u.c) throw FrameError(ErrorCode::NotOneUniform, "diagonal of the cross-Gram is not constant");
  const int n = ds.size();
  if (n < 2) throw FrameError(ErrorCode::InvalidArgument, "two erasures need N >= 2");
  const Matrix& a = ds.cross_gram();
  const double c = ds.op().trace() / n;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto root = std::sqrt(std::complex<double>(a(i, j) * a(j, i), 0.0));
      best = std::max(best, std::abs(c + root));
    }
  }
  return best;
}

ErasureReport erasure_report(const DualSystem& ds, double tol) {
  ErasureReport rep;
  const auto a = o1(ds);
  const auto b = r1(ds);
  rep.o1 = a.value;
  rep.argmax_o1 = a.index;
  rep.r1 = b.value;
  rep.argmax_r1 = b.index;
  if (ds.size() >= 2) {
    const auto c = r2_closed_form(ds);
    rep.r2 = c.value;
    rep.argmax_r2 = std::make_pair(c.i, c.j);
  }
  const auto u = uniformity(ds, tol);
  rep.uniform1 = u.c;
  rep.uniform2 = u.c_prime;
  return rep;
}

}  // namespace framekit
