#include "framekit/dual_search.hpp"

#include "framekit/erasure.hpp"
#include "framekit/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <random>
#include <string>

namespace framekit {

const char* to_string(SearchMeasure m) noexcept { return m == SearchMeasure::O1 ? "o1" : "r1"; }

double measure_value(const Frame& f, const Frame& g, SearchMeasure kind) {
  const Matrix& fs = f.synthesis();
  const Matrix& gs = g.synthesis();
  double best = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const double v = kind == SearchMeasure::O1 ? fs.col(i).norm() * gs.col(i).norm()
                                               : std::abs(fs.col(i).dot(gs.col(i)));
    best = std::max(best, v);
  }
  return best;
}

namespace {

struct Eval {
  double value;
  Vector grad;
};

using Objective = std::function<Eval(const Vector&)>;

// g_i(x) = base_i + A_i x for each frame index.
struct AffineDuals {
  Matrix fs;
  Matrix base;
  std::vector<Matrix> blocks;
  Vector fnorm;
  Vector a;  // <f_i, base_i>
  Matrix s;  // row i: A_i^T f_i
};

AffineDuals make_affine(const Frame& f, const Matrix& base, const std::vector<Matrix>& basis) {
  AffineDuals p;
  p.fs = f.synthesis();
  p.base = base;
  const int n = f.dim();
  const int big = f.size();
  const int dof = static_cast<int>(basis.size());
  p.blocks.assign(big, Matrix(n, dof));
  for (int k = 0; k < dof; ++k) {
    for (int i = 0; i < big; ++i) p.blocks[i].col(k) = basis[k].col(i);
  }
  p.fnorm.resize(big);
  p.a.resize(big);
  p.s.resize(big, dof);
  for (int i = 0; i < big; ++i) {
    p.fnorm(i) = p.fs.col(i).norm();
    p.a(i) = p.fs.col(i).dot(base.col(i));
    p.s.row(i) = (p.blocks[i].transpose() * p.fs.col(i)).transpose();
  }
  return p;
}

// Pointwise max of per-index convex pieces; tied subgradients are averaged.
Objective make_objective(const AffineDuals& p, SearchMeasure kind) {
  return [&p, kind](const Vector& x) {
    const int big = static_cast<int>(p.fs.cols());
    Vector vals(big);
    std::vector<Vector> grads(big);
    for (int i = 0; i < big; ++i) {
      if (kind == SearchMeasure::R1) {
        const double lin = p.a(i) + p.s.row(i).dot(x);
        vals(i) = std::abs(lin);
        grads[i] = (lin >= 0.0 ? 1.0 : -1.0) * p.s.row(i).transpose();
      } else {
        const Vector g = p.base.col(i) + p.blocks[i] * x;
        const double gn = g.norm();
        vals(i) = p.fnorm(i) * gn;
        grads[i] = gn > 0.0 ? Vector(p.fnorm(i) / gn * (p.blocks[i].transpose() * g))
                            : Vector(Vector::Zero(x.size()));
      }
    }
    const double top = vals.maxCoeff();
    const double tie = 1e-12 * std::max(1.0, std::abs(top));
    Vector grad = Vector::Zero(x.size());
    int count = 0;
    for (int i = 0; i < big; ++i) {
      if (vals(i) >= top - tie) {
        grad += grads[i];
        ++count;
      }
    }
    return Eval{top, grad / count};
  };
}

struct Descent {
  Vector x;
  double value;
  std::vector<double> trace;
};

// Variable-target Polyak subgradient method: the level sits delta below the
// record value and delta halves whenever the path since the last record
// exceeds the bound without sufficient descent.
Descent level_descent(const Objective& obj, Vector x, const SearchConfig& cfg, double radius) {
  Eval e = obj(x);
  Descent out{x, e.value, {}};
  out.trace.reserve(cfg.max_iters);
  double delta = cfg.step_init * std::max(1.0, std::abs(e.value));
  double path = 0.0;
  const double bound = std::max(1.0, radius);
  for (int it = 0; it < cfg.max_iters; ++it) {
    const double gn2 = e.grad.squaredNorm();
    if (gn2 == 0.0) {
      out.trace.push_back(out.value);
      break;
    }
    const double level = cfg.target ? *cfg.target : out.value - delta;
    const double t = std::max(0.0, e.value - level) / gn2;
    if (t == 0.0 && cfg.target) {
      out.trace.push_back(out.value);
      break;
    }
    x -= t * e.grad;
    path += t * std::sqrt(gn2);
    e = obj(x);
    if (e.value < out.value) {
      const bool sufficient = e.value <= out.value - 0.5 * delta;
      out.value = e.value;
      out.x = x;
      if (sufficient) path = 0.0;
    }
    if (!cfg.target && path > bound) {
      delta *= 0.5;
      path = 0.0;
      x = out.x;
      e = obj(x);
    }
    out.trace.push_back(out.value);
    const int n = static_cast<int>(out.trace.size());
    if (n > 50 && out.trace[n - 51] - out.value < cfg.tol_value &&
        (cfg.target || delta < cfg.tol_value)) {
      break;
    }
  }
  return out;
}

// Smoothed max: mu log sum exp(h_j / mu) sits between max h and max h + mu log M.
// Damped Newton on it with mu shrinking geometrically; each stage starts from the
// previous minimizer. The R1 pieces are +-(a_i + s_i x), the O1 pieces are
// |f_i| |base_i + A_i x|.
struct Smoothed {
  double value;  // smoothed value
  double top;    // true max
  Vector grad;
  Matrix hess;
};

Smoothed smoothed_eval(const AffineDuals& p, SearchMeasure kind, const Vector& x, double mu,
                       bool with_hess) {
  const int big = static_cast<int>(p.fs.cols());
  const int dof = static_cast<int>(x.size());
  const int pieces = kind == SearchMeasure::R1 ? 2 * big : big;
  Vector h(pieces);
  Matrix dh(dof, pieces);
  Matrix local = with_hess ? Matrix::Zero(dof, dof) : Matrix(0, 0);
  std::vector<Matrix> piece_hess;
  std::vector<Vector> gs;
  for (int i = 0; i < big; ++i) {
    if (kind == SearchMeasure::R1) {
      const double lin = p.a(i) + p.s.row(i).dot(x);
      h(2 * i) = lin;
      h(2 * i + 1) = -lin;
      dh.col(2 * i) = p.s.row(i).transpose();
      dh.col(2 * i + 1) = -p.s.row(i).transpose();
    } else {
      gs.push_back(p.base.col(i) + p.blocks[i] * x);
      const double gn = std::max(gs.back().norm(), 1e-300);
      h(i) = p.fnorm(i) * gs.back().norm();
      dh.col(i) = p.fnorm(i) / gn * (p.blocks[i].transpose() * gs.back());
    }
  }
  const double top = h.maxCoeff();
  const Vector w = ((h.array() - top) / mu).exp().matrix();
  const double sum = w.sum();
  const Vector prob = w / sum;
  Smoothed out{top + mu * std::log(sum), top, dh * prob, Matrix()};
  if (!with_hess) return out;
  if (kind == SearchMeasure::O1) {
    for (int i = 0; i < big; ++i) {
      if (prob(i) < 1e-300) continue;
      const double gn = std::max(gs[i].norm(), 1e-12);
      const Vector u = gs[i] / gn;
      const Matrix proj = Matrix::Identity(u.size(), u.size()) - u * u.transpose();
      local += prob(i) * p.fnorm(i) / gn * (p.blocks[i].transpose() * proj * p.blocks[i]);
    }
  }
  out.hess = local + (dh * prob.asDiagonal() * dh.transpose() - out.grad * out.grad.transpose()) / mu;
  return out;
}

Descent smooth_polish(const AffineDuals& p, SearchMeasure kind, Descent start, double tol) {
  const int pieces = kind == SearchMeasure::R1 ? 2 * static_cast<int>(p.fs.cols())
                                               : static_cast<int>(p.fs.cols());
  const double log_m = std::log(static_cast<double>(std::max(2, pieces)));
  Vector x = start.x;
  Descent out = std::move(start);
  double mu = 1e-2 * std::max(1.0, std::abs(out.value));
  const double mu_end = 0.1 * tol / log_m;
  while (true) {
    for (int it = 0; it < 100; ++it) {
      const Smoothed e = smoothed_eval(p, kind, x, mu, true);
      Matrix hreg = e.hess;
      const double ridge = 1e-14 * std::max(1.0, hreg.diagonal().cwiseAbs().maxCoeff());
      hreg.diagonal().array() += ridge;
      Eigen::LDLT<Matrix> ldlt(hreg);
      Vector d = -ldlt.solve(e.grad);
      if (!d.allFinite() || d.dot(e.grad) >= 0.0) d = -e.grad;
      const double slope = d.dot(e.grad);
      if (-slope < 1e-30 * std::max(1.0, std::abs(e.value))) break;
      double step = 1.0;
      Smoothed trial = smoothed_eval(p, kind, x + d, mu, false);
      while (trial.value > e.value + 1e-4 * step * slope && step > 1e-12) {
        step *= 0.5;
        trial = smoothed_eval(p, kind, x + step * d, mu, false);
      }
      if (trial.value >= e.value) break;
      x += step * d;
      if (trial.top < out.value) {
        out.value = trial.top;
        out.x = x;
      }
      out.trace.push_back(out.value);
      if (-slope < 1e-3 * mu) break;
    }
    if (mu <= mu_end) break;
    mu = std::max(mu_end, 0.2 * mu);
  }
  return out;
}

Vector random_start(int dof, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector x(dof);
  const double s = 0.5 * scale / std::sqrt(static_cast<double>(std::max(1, dof)));
  for (int k = 0; k < dof; ++k) x(k) = s * gauss(rng);
  return x;
}

// Runs every restart (restart 0 from the origin) and keeps the lowest value,
// ties going to the lower restart index.
template <class Run>
std::pair<Descent, int> best_of_restarts(int restarts, Run run) {
  const int count = std::max(1, restarts);
  std::vector<std::future<Descent>> jobs;
  jobs.reserve(count);
  for (int r = 0; r < count; ++r) {
    jobs.push_back(std::async(std::launch::async, run, r));
  }
  std::vector<Descent> results;
  results.reserve(count);
  for (auto& j : jobs) results.push_back(j.get());
  int best = 0;
  for (int r = 1; r < count; ++r) {
    if (results[r].value < results[best].value) best = r;
  }
  return {std::move(results[best]), best};
}

void check_config(const SearchConfig& cfg) {
  if (cfg.max_iters <= 0 || cfg.step_init <= 0.0 || cfg.tol_value <= 0.0 || cfg.restarts <= 0 ||
      cfg.grid_points_per_dof <= 0 || cfg.dof_cap_for_grid < 0) {
    throw FrameError(ErrorCode::InvalidArgument, "search configuration values must be positive");
  }
}

Frame checked_dual(const Frame& f, const OperatorSpec& op, Matrix g) {
  Frame out(std::move(g));
  if (verify_k_dual(f, out, op) == DualKind::NotDual) {
    throw FrameError(ErrorCode::NumericalFailure, "search drifted off the dual space");
  }
  return out;
}

}  // namespace

SearchResult minimize_measure(const Frame& f, const OperatorSpec& op, SearchMeasure kind,
                              const SearchConfig& cfg) {
  check_config(cfg);
  const auto param = dual_parameterization(f, op);
  const Matrix& base = param.base.synthesis();
  if (param.dof == 0) {
    return {param.base, measure_value(f, param.base, kind), Vector(0),
            {measure_value(f, param.base, kind)}, 0};
  }
  const AffineDuals p = make_affine(f, base, param.basis);
  const Objective obj = make_objective(p, kind);
  const double scale = std::max(1.0, base.norm());
  auto [best, restart] = best_of_restarts(cfg.restarts, [&](int r) {
    Vector x0 = r == 0 ? Vector(Vector::Zero(param.dof))
                       : random_start(param.dof, scale, cfg.seed + static_cast<std::uint64_t>(r));
    const double radius = x0.norm() + scale;
    Descent d = level_descent(obj, std::move(x0), cfg, radius);
    return cfg.target ? d : smooth_polish(p, kind, std::move(d), cfg.tol_value);
  });
  Frame dual = reconstruct_dual(param, best.x);
  Frame checked = checked_dual(f, op, dual.synthesis());
  return {std::move(checked), best.value, best.x, std::move(best.trace), restart};
}

SearchResult minimize_r2_within_uniform(const Frame& f, const OperatorSpec& op,
                                        const SearchConfig& cfg) {
  check_config(cfg);
  const int big = f.size();
  if (big < 2) throw FrameError(ErrorCode::InvalidArgument, "two erasures need N >= 2");
  const auto param = dual_parameterization(f, op);
  const Matrix& base = param.base.synthesis();
  const Matrix& fs = f.synthesis();
  const double tau = op.trace() / big;

  // Diagonal constraint S x = tau - a.
  Matrix s(big, param.dof);
  Vector rhs(big);
  for (int i = 0; i < big; ++i) {
    rhs(i) = tau - fs.col(i).dot(base.col(i));
    for (int k = 0; k < param.dof; ++k) s(i, k) = fs.col(i).dot(param.basis[k].col(i));
  }
  Vector xp = Vector::Zero(param.dof);
  if (param.dof > 0) xp = pseudo_inverse(s) * rhs;
  const double resid = param.dof > 0 ? (s * xp - rhs).norm() : rhs.norm();
  if (resid > 1e-9 * std::max(1.0, rhs.norm())) {
    throw FrameError(ErrorCode::Infeasible, "no dual has constant diagonal tr(K)/N");
  }
  const Matrix z = param.dof > 0 ? null_space(s) : Matrix(0, 0);
  const int free = static_cast<int>(z.cols());

  std::vector<Matrix> d(param.dof);
  for (int k = 0; k < param.dof; ++k) d[k] = param.basis[k].transpose() * fs;

  auto dual_of = [&](const Vector& y) {
    Vector x = xp;
    if (free > 0) x += z * y;
    Matrix g = base;
    for (int k = 0; k < param.dof; ++k) g += x(k) * param.basis[k];
    return std::make_pair(g, x);
  };

  const Objective obj = [&](const Vector& y) {
    const auto [g, x] = dual_of(y);
    const Matrix alpha = g.transpose() * fs;
    double top = -1.0;
    int bi = 0;
    int bj = 1;
    for (int i = 0; i < big; ++i) {
      for (int j = i + 1; j < big; ++j) {
        const double v = two_erasure_radius(alpha(i, i), alpha(j, j), alpha(i, j), alpha(j, i));
        if (v > top) {
          top = v;
          bi = i;
          bj = j;
        }
      }
    }
    Vector grad = Vector::Zero(free);
    if (free > 0) {
      const double p = alpha(bi, bj) * alpha(bj, bi);
      double dvdp;
      if (p >= 0.0) {
        const double root = std::max(std::sqrt(p), 1e-8);
        dvdp = (tau + root >= 0.0 ? 1.0 : -1.0) / (2.0 * root);
      } else {
        dvdp = -1.0 / (2.0 * std::max(std::sqrt(tau * tau - p), 1e-8));
      }
      Vector gx(param.dof);
      for (int k = 0; k < param.dof; ++k) {
        gx(k) = dvdp * (d[k](bi, bj) * alpha(bj, bi) + alpha(bi, bj) * d[k](bj, bi));
      }
      grad = z.transpose() * gx;
    }
    return Eval{top, grad};
  };

  const double scale = std::max(1.0, base.norm());
  auto run = [&](int r) {
    Vector y = r == 0 || free == 0
                   ? Vector(Vector::Zero(free))
                   : random_start(free, scale, cfg.seed + static_cast<std::uint64_t>(r));
    Eval e = obj(y);
    Descent out{y, e.value, {e.value}};
    if (free == 0) return out;
    for (int it = 1; it <= cfg.max_iters; ++it) {
      const double gn = e.grad.norm();
      if (gn == 0.0) break;
      y -= (cfg.step_init * scale / std::sqrt(static_cast<double>(it))) * (e.grad / gn);
      e = obj(y);
      if (e.value < out.value) {
        out.value = e.value;
        out.x = y;
      }
      out.trace.push_back(out.value);
    }
    return out;
  };
  auto [best, restart] = best_of_restarts(free == 0 ? 1 : cfg.restarts, run);
  auto [g, x] = dual_of(best.x);
  Frame checked = checked_dual(f, op, std::move(g));
  return {std::move(checked), best.value, x, std::move(best.trace), restart};
}

GridResult brute_force_grid_oracle(const Frame& f, const OperatorSpec& op, SearchMeasure kind,
                                   const SearchConfig& cfg, const std::vector<Matrix>* basis) {
  check_config(cfg);
  const auto param = dual_parameterization(f, op);
  const std::vector<Matrix>& dirs = basis ? *basis : param.basis;
  const int dof = static_cast<int>(dirs.size());
  for (const auto& m : dirs) {
    if (m.rows() != f.dim() || m.cols() != f.size()) {
      throw FrameError(ErrorCode::DimensionMismatch, "grid direction has the wrong shape");
    }
  }
  if (dof > cfg.dof_cap_for_grid) {
    throw FrameError(ErrorCode::DofTooLarge, std::to_string(dof) + " degrees of freedom exceed the grid cap of " +
                                                 std::to_string(cfg.dof_cap_for_grid));
  }
  const Matrix& base = param.base.synthesis();
  const double scale = base.norm();
  const int pts = cfg.grid_points_per_dof;
  Vector ticks(pts);
  for (int t = 0; t < pts; ++t) {
    ticks(t) = pts == 1 ? 0.0 : scale * (-1.0 + 2.0 * t / (pts - 1));
  }

  std::vector<double> values;
  std::vector<Vector> points;
  std::vector<int> odo(dof, 0);
  while (true) {
    Vector x(dof);
    Matrix g = base;
    for (int k = 0; k < dof; ++k) {
      x(k) = ticks(odo[k]);
      g += x(k) * dirs[k];
    }
    values.push_back(measure_value(f, Frame(std::move(g)), kind));
    points.push_back(std::move(x));
    int k = 0;
    while (k < dof && ++odo[k] == pts) odo[k++] = 0;
    if (k == dof) break;
  }
  GridResult out{std::numeric_limits<double>::infinity(), Vector(dof), 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < out.value) {
      out.value = values[i];
      out.argmin = points[i];
    }
  }
  for (double v : values) {
    if (v <= out.value + 1e-12) ++out.attained;
  }
  return out;
}

}  // namespace framekit
