#include "framekit/optimal_duals.hpp"

#include "framekit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace framekit {

const char* to_string(MeasureKind k) noexcept {
  return k == MeasureKind::OpNorm ? "opnorm" : "spectral";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::OptimalSufficient: return "OptimalSufficient";
    case Verdict::OptimalUncountableFamily: return "OptimalUncountableFamily";
    case Verdict::UniqueOptimal: return "UniqueOptimal";
    case Verdict::NotOptimal: return "NotOptimal";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "Unknown";
}

namespace {

Matrix columns(const Matrix& m, const std::vector<int>& idx) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(idx[k]);
  return out;
}

bool independent(const Matrix& m, double tol = kDefaultTol) {
  if (m.cols() == 0) return true;
  return numeric_rank(m, tol) == m.cols() && m.norm() > 0.0;
}

double weight_of(MeasureKind kind, const Vector& f, const Vector& g) {
  return kind == MeasureKind::OpNorm ? f.norm() * g.norm() : std::abs(f.dot(g));
}

double max_weight(MeasureKind kind, const Matrix& f, const Matrix& g) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < f.cols(); ++i) best = std::max(best, weight_of(kind, f.col(i), g.col(i)));
  return best;
}

SearchMeasure search_kind(MeasureKind k) {
  return k == MeasureKind::OpNorm ? SearchMeasure::O1 : SearchMeasure::R1;
}

template <class Fn>
bool for_each_subset_until(const std::vector<int>& pool, int m, Fn&& fn) {
  const int n = static_cast<int>(pool.size());
  if (m > n) return false;
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> pick(m);
  while (true) {
    for (int k = 0; k < m; ++k) pick[k] = pool[idx[k]];
    if (fn(pick)) return true;
    int k = m - 1;
    while (k >= 0 && idx[k] == n - m + k) --k;
    if (k < 0) return false;
    ++idx[k];
    for (int t = k + 1; t < m; ++t) idx[t] = idx[t - 1] + 1;
  }
}

}  // namespace

WeightPartition weight_partition(const Frame& f, const OperatorSpec& op, MeasureKind kind,
                                 double tol) {
  if (kind == MeasureKind::Spectral && !op.psd()) {
    throw FrameError(ErrorCode::NotPSD, "spectral weights need a positive semi-definite K");
  }
  const Frame canon = canonical_k_dual(f, op);
  const Matrix& fs = f.synthesis();
  const Matrix& gs = canon.synthesis();
  WeightPartition part{kind, Vector(f.size()), 0.0, {}, {}, Matrix(), Matrix()};
  for (int i = 0; i < f.size(); ++i) part.weights(i) = weight_of(kind, fs.col(i), gs.col(i));
  part.top_value = part.weights.maxCoeff();
  for (int i = 0; i < f.size(); ++i) {
    (part.weights(i) >= part.top_value - tol ? part.top : part.rest).push_back(i);
  }
  part.span_top = range_basis(columns(fs, part.top));
  part.span_rest = part.rest.empty() ? Matrix(f.dim(), 0) : range_basis(columns(fs, part.rest));
  return part;
}

bool spans_intersect_trivially(const WeightPartition& part, double tol) {
  const auto a = part.span_top.cols();
  const auto b = part.span_rest.cols();
  if (a == 0 || b == 0) return true;
  Matrix joined(part.span_top.rows(), a + b);
  joined << part.span_top, part.span_rest;
  return numeric_rank(joined, tol) == a + b;
}

Vector solve_equal_inner_products(const Matrix& vectors, double alpha, double tol) {
  const auto m = vectors.cols();
  if (m == 0) return Vector::Zero(vectors.rows());
  if (!independent(vectors, tol)) {
    throw FrameError(ErrorCode::DependentInput, "vectors are linearly dependent");
  }
  const Vector rhs = Vector::Constant(m, alpha);
  const Vector h = pseudo_inverse(vectors.transpose(), tol) * rhs;
  const double resid = (vectors.transpose() * h - rhs).lpNorm<Eigen::Infinity>();
  if (resid > 1e-9 * std::max(1.0, std::abs(alpha))) {
    throw FrameError(ErrorCode::NumericalFailure, "equal inner product system is ill-conditioned");
  }
  return h;
}

PerturbationFamily perturbation_family(const Frame& f, const OperatorSpec& op, MeasureKind kind,
                                       double tol) {
  const WeightPartition part = weight_partition(f, op, kind, tol);
  const auto param = dual_parameterization(f, op);
  PerturbationFamily out;
  if (param.dof == 0) return out;
  const Matrix& fs = f.synthesis();
  const int n = f.dim();

  const int per = kind == MeasureKind::OpNorm ? n : 1;
  Matrix c(static_cast<Eigen::Index>(part.top.size()) * per, param.dof);
  for (std::size_t t = 0; t < part.top.size(); ++t) {
    const int i = part.top[t];
    for (int k = 0; k < param.dof; ++k) {
      if (kind == MeasureKind::OpNorm) {
        c.block(static_cast<Eigen::Index>(t) * n, k, n, 1) = param.basis[k].col(i);
      } else {
        c(static_cast<Eigen::Index>(t), k) = fs.col(i).dot(param.basis[k].col(i));
      }
    }
  }
  const Matrix z = c.rows() == 0 ? Matrix(Matrix::Identity(param.dof, param.dof)) : null_space(c);
  if (z.cols() == 0) return out;

  Matrix u = Matrix::Zero(n, f.size());
  for (int k = 0; k < param.dof; ++k) u += z(k, 0) * param.basis[k];
  u /= u.norm();

  const Matrix& base = param.base.synthesis();
  const double top = part.top_value;
  double radius = std::numeric_limits<double>::infinity();
  for (int i : part.rest) {
    const Vector ui = u.col(i);
    if (ui.norm() <= kDefaultTol) continue;
    const Vector fi = fs.col(i);
    const Vector ai = base.col(i);
    double ri;
    if (kind == MeasureKind::Spectral) {
      const double s = fi.dot(ui);
      if (std::abs(s) <= kDefaultTol) continue;
      ri = (top - std::abs(part.weights(i))) / std::abs(s);
    } else {
      const double fn2 = fi.squaredNorm();
      if (fn2 == 0.0) continue;
      // ||a + t u||^2 < top^2 / ||f||^2 between the two roots of a quadratic.
      const double qa = ui.squaredNorm();
      const double qb = 2.0 * ai.dot(ui);
      const double qc = ai.squaredNorm() - top * top / fn2;
      const double disc = std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc));
      const double lo = (-qb - disc) / (2.0 * qa);
      const double hi = (-qb + disc) / (2.0 * qa);
      ri = std::min(-lo, hi);
    }
    radius = std::min(radius, std::max(0.0, ri));
  }
  out.exists = true;
  out.direction = std::move(u);
  out.radius = radius;
  return out;
}

OptimalityCertificate canonical_certificate(const Frame& f, const OperatorSpec& op,
                                            MeasureKind kind, double tol,
                                            const SearchConfig& fallback) {
  if (!op.psd()) throw FrameError(ErrorCode::NotPSD, "K is not positive semi-definite");
  const WeightPartition part = weight_partition(f, op, kind, tol);
  const Matrix& fs = f.synthesis();
  OptimalityCertificate cert{Verdict::Undetermined, {}};
  auto& ev = cert.evidence;
  ev.canonical_value = part.top_value;
  ev.spans_trivial = spans_intersect_trivially(part);
  ev.top_independent = independent(columns(fs, part.top));
  ev.rest_independent = independent(columns(fs, part.rest));

  if (ev.spans_trivial) {
    const auto fam = perturbation_family(f, op, kind, tol);
    ev.family = fam;
    const bool unique = kind == MeasureKind::OpNorm ? ev.rest_independent : !fam.exists;
    if (unique) {
      cert.verdict = Verdict::UniqueOptimal;
      ev.hypothesis = kind == MeasureKind::OpNorm
                          ? "top and rest spans meet only at 0; rest vectors independent"
                          : "top and rest spans meet only at 0; no dual direction keeps the top diagonal";
    } else if (fam.exists && fam.radius > 0.0) {
      cert.verdict = Verdict::OptimalUncountableFamily;
      ev.hypothesis = "top and rest spans meet only at 0; a line of optimal duals exists";
    } else {
      cert.verdict = Verdict::OptimalSufficient;
      ev.hypothesis = "top and rest spans meet only at 0";
    }
    return cert;
  }

  const Matrix w = null_space(fs);
  if (ev.top_independent && w.cols() > 0) {
    bool coverable = true;
    for (int i : part.top) coverable = coverable && w.row(i).norm() > kDefaultTol;
    if (coverable) {
      std::mt19937_64 rng(0x5eedULL);
      std::normal_distribution<double> gauss(0.0, 1.0);
      Vector best_c;
      double best_gap = 0.0;
      for (int attempt = 0; attempt < 16; ++attempt) {
        Vector y(w.cols());
        for (Eigen::Index k = 0; k < y.size(); ++k) y(k) = attempt == 0 ? 1.0 : gauss(rng);
        Vector cvec = w * y;
        cvec /= cvec.norm();
        double gap = std::numeric_limits<double>::infinity();
        for (int i : part.top) gap = std::min(gap, std::abs(cvec(i)));
        if (gap > best_gap) {
          best_gap = gap;
          best_c = cvec;
        }
      }
      if (best_gap > 1e-8) {
        const Frame canon = canonical_k_dual(f, op);
        const Matrix& gs = canon.synthesis();
        Matrix v(f.dim(), static_cast<Eigen::Index>(part.top.size()));
        for (std::size_t t = 0; t < part.top.size(); ++t) {
          const int i = part.top[t];
          v.col(static_cast<Eigen::Index>(t)) =
              best_c(i) * (kind == MeasureKind::OpNorm ? Vector(gs.col(i)) : Vector(fs.col(i)));
        }
        const Vector h = solve_equal_inner_products(v, -1.0);
        const Matrix u = h * best_c.transpose();
        const double margin = 1e-12 * std::max(1.0, part.top_value);
        double t = 1.0;
        for (int halving = 0; halving < 80; ++halving, t *= 0.5) {
          const double val = max_weight(kind, fs, gs + t * u);
          if (val < part.top_value - margin) {
            cert.verdict = Verdict::NotOptimal;
            ev.hypothesis = "top vectors independent; a null-space relation touches every top index";
            ev.dependence = best_c;
            ev.h = h;
            ev.step = t;
            ev.improved_value = val;
            return cert;
          }
        }
      }
    }
  }

  ev.hypothesis = "no sufficient or necessary condition applies";
  ev.numeric_value = minimize_measure(f, op, search_kind(kind), fallback).value;
  return cert;
}

std::optional<Connection> is_linearly_connected_pair(const Frame& f, int i, int j, double tol,
                                                     const std::vector<int>* candidates, int cap) {
  const int big = f.size();
  if (i == j) throw FrameError(ErrorCode::InvalidArgument, "a pair needs two distinct indices");
  if (i < 0 || j < 0 || i >= big || j >= big) {
    throw FrameError(ErrorCode::IndexOutOfRange, "pair index outside the frame");
  }
  std::vector<int> pool;
  if (candidates) {
    for (int k : *candidates) {
      if (k != i && k != j) pool.push_back(k);
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  } else {
    for (int k = 0; k < big; ++k) {
      if (k != i && k != j) pool.push_back(k);
    }
  }
  if (static_cast<int>(pool.size()) + 2 > cap) {
    throw FrameError(ErrorCode::BudgetExceeded,
                     "subset search over " + std::to_string(pool.size() + 2) +
                         " vectors exceeds the cap of " + std::to_string(cap));
  }
  const Matrix& fs = f.synthesis();
  const Vector target = fs.col(i);
  const double scale = std::max(1.0, target.norm());
  const int max_size = std::min(static_cast<int>(pool.size()), f.dim() - 1);
  std::optional<Connection> found;
  for (int m = 0; m <= max_size && !found; ++m) {
    for_each_subset_until(pool, m, [&](const std::vector<int>& pick) {
      Matrix b(f.dim(), m + 1);
      b.col(0) = fs.col(j);
      for (int k = 0; k < m; ++k) b.col(k + 1) = fs.col(pick[k]);
      if (!independent(b)) return false;
      const Vector coef = b.colPivHouseholderQr().solve(target);
      if ((b * coef - target).norm() > tol * scale) return false;
      if (coef.cwiseAbs().minCoeff() <= tol) return false;
      Connection c{coef(0), pick, {}};
      for (int k = 0; k < m; ++k) c.coefs.push_back(coef(k + 1));
      found = std::move(c);
      return true;
    });
  }
  return found;
}

ConnectedDecomposition connected_decomposition(const Frame& f, const OperatorSpec& op, double tol,
                                               int cap) {
  if (f.dim() != op.dim()) throw FrameError(ErrorCode::DimensionMismatch, "frame and K disagree on n");
  const Matrix& fs = f.synthesis();
  const int big = f.size();
  const double scale = std::max(1e-300, fs.colwise().norm().maxCoeff());

  std::vector<int> parent(big);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  const Matrix gram = fs.transpose() * fs;
  for (int a = 0; a < big; ++a) {
    for (int b = a + 1; b < big; ++b) {
      if (std::abs(gram(a, b)) > tol * scale * scale) unite(a, b);
    }
  }

  // Merge groups whose spans are not mutually orthogonal until stable.
  auto groups = [&] {
    std::vector<std::vector<int>> out;
    std::vector<int> slot(big, -1);
    for (int k = 0; k < big; ++k) {
      const int r = find(k);
      if (slot[r] < 0) {
        slot[r] = static_cast<int>(out.size());
        out.emplace_back();
      }
      out[slot[r]].push_back(k);
    }
    return out;
  };
  for (bool merged = true; merged;) {
    merged = false;
    const auto gs = groups();
    std::vector<Matrix> bases;
    for (const auto& g : gs) bases.push_back(range_basis(columns(fs, g)));
    for (std::size_t a = 0; a < gs.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < gs.size() && !merged; ++b) {
        if (bases[a].cols() == 0 || bases[b].cols() == 0) continue;
        if ((bases[a].transpose() * bases[b]).norm() > std::sqrt(tol)) {
          unite(gs[a].front(), gs[b].front());
          merged = true;
        }
      }
    }
  }

  ConnectedDecomposition out;
  const Matrix& k = op.matrix();
  const double kscale = std::max(1.0, op.norm());
  for (const auto& g : groups()) {
    ConnectedBlock blk;
    blk.indices = g;
    blk.basis = range_basis(columns(fs, g));
    const Matrix p = blk.basis * blk.basis.transpose();
    const Matrix leak = (Matrix::Identity(f.dim(), f.dim()) - p) * k * p;
    blk.k_invariant = leak.norm() <= std::sqrt(tol) * kscale;
    blk.delta = blk.basis.cols() == 0 ? 0.0
                                      : (blk.basis.transpose() * k * blk.basis).trace() /
                                            static_cast<double>(g.size());
    blk.connected = true;
    if (g.size() > 1) {
      if (big > cap) {
        blk.connected = false;
        blk.diagnostic = "connectivity not verified: N exceeds the subset-search cap";
      } else {
        for (std::size_t a = 0; a < g.size() && blk.connected; ++a) {
          for (std::size_t b = 0; b < g.size() && blk.connected; ++b) {
            if (a == b) continue;
            if (!is_linearly_connected_pair(f, g[a], g[b], tol, &g, cap)) {
              blk.connected = false;
              blk.diagnostic = "vectors " + std::to_string(g[a] + 1) + " and " +
                               std::to_string(g[b] + 1) + " are not linearly connected";
            }
          }
        }
      }
    }
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

MinR1 min_r1_fixed_frame(const Frame& f, const OperatorSpec& op, double tol,
                         const SearchConfig& fallback) {
  if (!op.psd()) throw FrameError(ErrorCode::NotPSD, "K is not positive semi-definite");
  const auto dec = connected_decomposition(f, op, tol);
  std::string warning;
  double best = 0.0;
  for (const auto& b : dec.blocks) {
    if (!b.k_invariant && warning.empty()) {
      warning = "a block span is not K-invariant; using the numerical minimum";
    }
    if (!b.connected && warning.empty()) {
      warning = b.diagnostic + "; using the numerical minimum";
    }
    best = std::max(best, b.delta);
  }
  if (warning.empty()) return {best, true, ""};
  const auto res = minimize_measure(f, op, SearchMeasure::R1, fallback);
  return {res.value, false, warning};
}

Frame improve_dual_step(const Frame& f, const Frame& g, const OperatorSpec& op, double tol,
                        const std::vector<int>* indices, std::optional<double> target) {
  if (verify_k_dual(f, g, op) == DualKind::NotDual) {
    throw FrameError(ErrorCode::NotDual, "G is not a K-dual of F");
  }
  const Matrix& fs = f.synthesis();
  const Matrix& gs = g.synthesis();
  std::vector<int> scope;
  if (indices) {
    scope = *indices;
  } else {
    scope.resize(f.size());
    std::iota(scope.begin(), scope.end(), 0);
  }
  const double goal = target.value_or(op.trace() / f.size());
  std::vector<int> open;
  for (int i : scope) {
    if (std::abs(fs.col(i).dot(gs.col(i)) - goal) > tol) open.push_back(i);
  }
  if (open.size() < 2) {
    throw FrameError(ErrorCode::NoConnectedPairAvailable,
                     "fewer than two indices are off the target diagonal");
  }
  // Every connected pair gives a valid step; keep the one with the smallest
  // correction, since a large one costs accuracy in the dual relation.
  std::optional<Matrix> best;
  double best_size = std::numeric_limits<double>::infinity();
  for (int i2 : open) {
    for (int i1 : open) {
      if (i1 == i2) continue;
      const auto conn = is_linearly_connected_pair(f, i1, i2, 1e-9, &scope);
      if (!conn) continue;
      const int m = static_cast<int>(conn->others.size());
      Matrix a(m + 1, f.dim());
      Vector rhs = Vector::Zero(m + 1);
      for (int k = 0; k < m; ++k) a.row(k) = fs.col(conn->others[k]).transpose();
      a.row(m) = fs.col(i2).transpose();
      rhs(m) = (goal - fs.col(i2).dot(gs.col(i2))) / conn->c;
      const Matrix ap = pseudo_inverse(a);
      Vector v = ap * rhs;
      v += ap * (rhs - a * v);
      Matrix corr = Matrix::Zero(f.dim(), f.size());
      corr.col(i1) = -v;
      corr.col(i2) = conn->c * v;
      for (int k = 0; k < m; ++k) corr.col(conn->others[k]) = conn->coefs[k] * v;
      const double size = corr.norm();
      if (size < best_size) {
        best_size = size;
        best = std::move(corr);
      }
    }
  }
  if (!best) {
    throw FrameError(ErrorCode::NoConnectedPairAvailable,
                     "no linearly connected pair among the off-target indices");
  }
  return Frame(gs + *best);
}

Frame construct_spectrally_optimal_dual(const Frame& f, const OperatorSpec& op, double tol) {
  if (!op.psd()) throw FrameError(ErrorCode::NotPSD, "K is not positive semi-definite");
  const auto dec = connected_decomposition(f, op, tol);
  for (const auto& b : dec.blocks) {
    if (!b.k_invariant) {
      throw FrameError(ErrorCode::NotKInvariant, "block span is not invariant under K");
    }
  }
  Frame g = standard_k_dual(f, op);
  const Matrix& fs = f.synthesis();
  for (const auto& b : dec.blocks) {
    const int limit = static_cast<int>(b.indices.size());
    for (int step = 0;; ++step) {
      bool done = true;
      for (int i : b.indices) {
        done = done && std::abs(fs.col(i).dot(g.synthesis().col(i)) - b.delta) <= kWeightTol;
      }
      if (done) break;
      if (step >= limit) {
        throw FrameError(ErrorCode::IterationCap, "diagonal equalization did not finish");
      }
      g = improve_dual_step(f, g, op, kWeightTol, &b.indices, b.delta);
    }
  }
  if (verify_k_dual(f, g, op) == DualKind::NotDual) {
    throw FrameError(ErrorCode::NumericalFailure, "constructed dual lost the dual relation");
  }
  return g;
}

double r2_special_closed_form(const DualSystem& ds, double tol) {
  const Matrix& a = ds.cross_gram();
  const int big = ds.size();
  if (big < 2) throw FrameError(ErrorCode::HypothesesNotMet, "two erasures need N >= 2");
  const Vector d = a.diagonal();
  if (d.minCoeff() < -tol) {
    throw FrameError(ErrorCode::HypothesesNotMet, "a diagonal entry <g_i, f_i> is negative");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (int i = 0; i < big; ++i) {
    for (int j = i + 1; j < big; ++j) {
      const double p = a(i, j) * a(j, i);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      sum += p;
    }
  }
  if (hi - lo > tol) {
    throw FrameError(ErrorCode::HypothesesNotMet, "off-diagonal products are not constant");
  }
  const double c = sum / (0.5 * big * (big - 1));
  const double r1 = d.maxCoeff();
  int delta_size = 0;
  double rest_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < big; ++i) {
    if (d(i) >= r1 - tol) {
      ++delta_size;
    } else {
      rest_max = std::max(rest_max, d(i));
    }
  }
  if (std::abs(c) <= tol) return r1;
  if (c > 0.0) {
    if (delta_size > 1) return r1 + std::sqrt(c);
    return 0.5 * (r1 + rest_max + std::sqrt((r1 - rest_max) * (r1 - rest_max) + 4.0 * c));
  }
  if (delta_size > 1) return std::sqrt(r1 * r1 - c);
  throw FrameError(ErrorCode::HypothesesNotMet,
                   "negative product with a single maximal diagonal entry");
}

TwoUniformOptimality two_uniform_spectral_optimality(const Frame& f, const Frame& g,
                                                     const OperatorSpec& op, double tol) {
  const DualSystem ds = make_dual_system(f, g, op);
  const int big = ds.size();
  if (big < 2) throw FrameError(ErrorCode::InvalidArgument, "two erasures need N >= 2");
  const auto u = uniformity(ds, tol);
  if (!u.c || !u.c_prime) throw FrameError(ErrorCode::NotTwoUniform, "pair is not 2-uniform");
  const double n = big;
  const double tr = op.trace();
  TwoUniformOptimality out;
  out.optimal = true;
  out.c = (op.trace_sq() - tr * tr / n) / (n * (n - 1.0));
  out.c_trace_variant = (tr - tr * tr / n) / (n * (n - 1.0));
  const double mean = tr / n;
  out.r2_value = out.c >= 0.0 ? std::abs(mean) + std::sqrt(out.c)
                              : std::sqrt(mean * mean - out.c);
  return out;
}

}  // namespace framekit
