#include "framekit/cli.hpp"

#include "framekit/dual_search.hpp"
#include "framekit/erasure.hpp"
#include "framekit/error.hpp"
#include "framekit/optimal_duals.hpp"
#include "framekit/optimal_pairs.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace framekit::cli {

using nlohmann::json;

namespace {

struct Check {
  json items = json::array();
  bool all = true;

  void add(const std::string& name, bool pass, const std::string& detail) {
    items.push_back({{"assertion", name}, {"pass", pass}, {"detail", detail}});
    all = all && pass;
  }

  // Exceptions inside one assertion fail that assertion only.
  void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
      auto [pass, detail] = fn();
      add(name, pass, detail);
    } catch (const std::exception& e) {
      add(name, false, std::string("threw: ") + e.what());
    }
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(15);
  s << v;
  return s.str();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Frame cols(std::initializer_list<std::initializer_list<double>> vs) {
  std::vector<std::vector<double>> v;
  for (auto c : vs) v.emplace_back(c);
  return build_frame(v);
}

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

json example_one() {
  const double r2 = std::sqrt(2.0);
  const Frame f = cols({{1, 0, 0}, {1, 0, 0}, {r2, 0, 0}, {0, 1, 0}});
  const OperatorSpec op = build_operator(diag({2, 1, 0}));
  Check ck;

  ck.run("parseval_and_canonical_dual", [&] {
    const Frame g = canonical_k_dual(f, op);
    const Matrix expect = cols({{0.5, 0, 0}, {0.5, 0, 0}, {std::sqrt(0.5), 0, 0}, {0, 1, 0}}).synthesis();
    const double err = (g.synthesis() - expect).cwiseAbs().maxCoeff();
    return std::make_pair(is_parseval_k_frame(f, op) && err == 0.0,
                          "max deviation from displayed dual " + num(err));
  });
  ck.run("weights", [&] {
    const auto a = weight_partition(f, op, MeasureKind::OpNorm);
    const auto b = weight_partition(f, op, MeasureKind::Spectral);
    const Vector expect = (Vector(4) << 0.5, 0.5, 1, 1).finished();
    const double err = std::max((a.weights - expect).cwiseAbs().maxCoeff(),
                                (b.weights - expect).cwiseAbs().maxCoeff());
    return std::make_pair(err <= 1e-12, "max weight error " + num(err));
  });
  ck.run("canonical_measures", [&] {
    const DualSystem ds = make_dual_system(f, canonical_k_dual(f, op), op);
    const double a = o1(ds).value;
    const double b = r1(ds).value;
    return std::make_pair(near(a, 1, 1e-12) && near(b, 1, 1e-12), "o1 " + num(a) + ", r1 " + num(b));
  });
  ck.run("trace_over_n", [&] {
    const double v = op.trace() / f.size();
    return std::make_pair(v == 0.75, num(v));
  });
  ck.run("perturbed_dual", [&] {
    const Frame canon = canonical_k_dual(f, op);
    Matrix g = canon.synthesis();
    const double a1 = 0.05;
    const double b1 = 0.05;
    g(0, 0) += a1;
    g(0, 1) += b1;
    g(0, 2) -= (a1 + b1) / r2;
    const Frame gp(g);
    const double third = g(0, 2);
    const bool dual = verify_k_dual(f, gp, op) != DualKind::NotDual;
    const double val = measure_value(f, gp, SearchMeasure::O1);
    return std::make_pair(dual && near(third, 0.6364, 1e-3) && near(third, 0.9 / r2, 1e-12) &&
                              near(val, 1, 1e-12),
                          "third vector first entry " + num(third) + ", o1 " + num(val));
  });
  ck.run("non_uniqueness", [&] {
    Matrix g = canonical_k_dual(f, op).synthesis();
    g(0, 0) += 0.05;
    g(0, 1) += 0.05;
    g(0, 2) -= 0.1 / r2;
    const Frame gp(g);
    const double a = measure_value(f, gp, SearchMeasure::O1);
    const double b = measure_value(f, gp, SearchMeasure::R1);
    const bool distinct = (g - canonical_k_dual(f, op).synthesis()).norm() > 1e-3;
    return std::make_pair(distinct && near(a, 1, 1e-12) && near(b, 1, 1e-12),
                          "o1 " + num(a) + ", r1 " + num(b));
  });
  ck.run("no_pair_attains_trace_bound", [&] {
    const double a = minimize_measure(f, op, SearchMeasure::O1).value;
    const double b = minimize_measure(f, op, SearchMeasure::R1).value;
    return std::make_pair(a >= 1 - 1e-6 && b >= 1 - 1e-6,
                          "searched minima o1 " + num(a) + ", r1 " + num(b) + " vs 0.75");
  });
  return {{"passed", ck.all}, {"assertions", ck.items}};
}

json example_two() {
  const double r2 = std::sqrt(2.0);
  const double h = 1 / r2;
  const Frame f = cols({{r2, 0, 0}, {r2, 0, 0}, {0, h, h}, {0, h, -h}});
  const Matrix k = diag({2, 1, 1});
  const OperatorSpec op = build_operator(k);
  Check ck;

  ck.run("parseval", [&] {
    const double err = (frame_operator(f) - k * k.transpose()).cwiseAbs().maxCoeff();
    return std::make_pair(err <= 1e-12, "max |S_F - KK^T| " + num(err));
  });
  ck.run("o1_equals_trace_bound", [&] {
    const DualSystem ds = make_dual_system(f, canonical_k_dual(f, op), op);
    const double a = o1(ds).value;
    const double b = r1(ds).value;
    const double t = op.trace() / f.size();
    return std::make_pair(near(a, 1, 1e-12) && near(b, 1, 1e-12) && near(t, 1, 1e-15),
                          "o1 " + num(a) + ", r1 " + num(b) + ", tr(K)/N " + num(t));
  });
  ck.run("pair_optimality", [&] {
    const DualSystem ds = make_dual_system(f, canonical_k_dual(f, op), op);
    const bool a = is_o1_optimal_pair(ds);
    const bool b = is_r1_optimal_pair(ds);
    return std::make_pair(a && b, std::string("o1 optimal ") + (a ? "yes" : "no") +
                                      ", r1 optimal " + (b ? "yes" : "no"));
  });
  ck.run("o1_uniqueness", [&] {
    const auto cert = canonical_certificate(f, op, MeasureKind::OpNorm);
    const auto grid = brute_force_grid_oracle(f, op, SearchMeasure::O1);
    const bool origin = grid.argmin.norm() == 0.0 && grid.attained == 1 && near(grid.value, 1, 1e-12);
    return std::make_pair(cert.verdict == Verdict::UniqueOptimal && origin,
                          std::string(to_string(cert.verdict)) + ", grid minimum " +
                              num(grid.value) + " attained at " + std::to_string(grid.attained) +
                              " point(s)");
  });
  ck.run("spectral_family", [&] {
    const auto cert = canonical_certificate(f, op, MeasureKind::Spectral);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
      const double beta = u(rng);
      const double gamma = u(rng);
      const Frame g = cols({{h, beta, gamma}, {h, -beta, -gamma}, {0, h, h}, {0, h, -h}});
      if (verify_k_dual(f, g, op) == DualKind::NotDual) return std::make_pair(false, std::string("family member is not a dual"));
      worst = std::max(worst, std::abs(measure_value(f, g, SearchMeasure::R1) - 1));
    }
    return std::make_pair(cert.verdict == Verdict::OptimalUncountableFamily && worst <= 1e-12,
                          std::string(to_string(cert.verdict)) + ", max |r1 - 1| " + num(worst));
  });
  ck.run("search_returns_canonical", [&] {
    const auto res = minimize_measure(f, op, SearchMeasure::O1);
    const double dist = (res.dual.synthesis() - canonical_k_dual(f, op).synthesis()).norm();
    return std::make_pair(near(res.value, 1, 1e-12) && dist <= 1e-9,
                          "value " + num(res.value) + ", distance to canonical " + num(dist));
  });
  return {{"passed", ck.all}, {"assertions", ck.items}};
}

json mercedes() {
  const double s = std::sqrt(3.0) / 2.0;
  const double a = std::sqrt(2.0 / 3.0);
  const Frame f = cols({{a, 0}, {-a / 2, a * s}, {-a / 2, -a * s}});
  const OperatorSpec op = build_operator(Matrix::Identity(2, 2));
  const DualSystem ds = make_dual_system(f, f, op);
  Check ck;

  ck.run("uniformity", [&] {
    const auto u = uniformity(ds);
    const bool ok = u.c && u.c_prime && near(*u.c, 2.0 / 3.0, 1e-12) && near(*u.c_prime, 1.0 / 9.0, 1e-12);
    return std::make_pair(ok, "c " + (u.c ? num(*u.c) : std::string("-")) + ", c' " +
                                  (u.c_prime ? num(*u.c_prime) : std::string("-")));
  });
  ck.run("pair_bound", [&] {
    const auto b = pair_bounds(op, 3);
    return std::make_pair(b.r2_min && near(*b.r2_min, 1, 1e-12), "r2_min " + num(*b.r2_min));
  });
  ck.run("r2_routes_agree", [&] {
    const double x = r2_closed_form(ds).value;
    const double y = r2_simplified_uniform(ds);
    const double z = rm_bruteforce(ds, 2).value;
    return std::make_pair(near(x, 1, 1e-12) && near(y, 1, 1e-12) && near(z, 1, 1e-12),
                          "closed " + num(x) + ", simplified " + num(y) + ", brute force " + num(z));
  });
  ck.run("two_uniform_optimal", [&] {
    const auto t = two_uniform_spectral_optimality(f, f, op);
    return std::make_pair(t.optimal && near(t.r2_value, 1, 1e-12), "r2 " + num(t.r2_value));
  });
  ck.run("uniform_slice_search", [&] {
    const double v = minimize_r2_within_uniform(f, op).value;
    return std::make_pair(near(v, 1, 1e-9), "searched r2 " + num(v));
  });
  return {{"passed", ck.all}, {"assertions", ck.items}};
}

}  // namespace

std::vector<std::string> example_names() { return {"example-1", "example-2", "mercedes"}; }

json cmd_verify_example(const std::string& name) {
  json j;
  j["schema"] = kSchema;
  j["command"] = "verify-example";
  j["example"] = name;
  json body;
  if (name == "example-1") {
    body = example_one();
  } else if (name == "example-2") {
    body = example_two();
  } else if (name == "mercedes") {
    body = mercedes();
  } else {
    throw FrameError(ErrorCode::InvalidArgument, "unknown example \"" + name + "\"");
  }
  j.update(body);
  return j;
}

}  // namespace framekit::cli
