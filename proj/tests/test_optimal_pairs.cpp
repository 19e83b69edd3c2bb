#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "framekit/erasure.hpp"
#include "framekit/error.hpp"
#include "framekit/frame.hpp"
#include "framekit/linalg.hpp"
#include "framekit/optimal_pairs.hpp"
#include "oracles.hpp"

using namespace framekit;

namespace {

Matrix diag3(double a, double b, double c) { return Vector{{a, b, c}}.asDiagonal(); }

DualSystem mercedes() {
  const double a = std::sqrt(2.0 / 3.0);
  const double s = std::sqrt(3.0) / 2.0;
  const Frame f = build_frame({{a, 0}, {-a / 2, a * s}, {-a / 2, -a * s}});
  return make_dual_system(f, f, build_operator(Matrix::Identity(2, 2)));
}

DualSystem onb_self_dual(int n) {
  const Frame f(Matrix::Identity(n, n));
  return make_dual_system(f, f, build_operator(Matrix::Identity(n, n)));
}

Vector column_sq_norms(const Matrix& m) { return m.colwise().squaredNorm().transpose(); }

}  // namespace

TEST_CASE("pair_bounds examples") {
  const PairBounds a = pair_bounds(build_operator(Matrix::Identity(2, 2)), 3);
  CHECK(a.o1_min == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(a.r1_min == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(a.mu == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(a.branch == MuBranch::MuNonneg);
  REQUIRE(a.r2_min.has_value());
  CHECK(*a.r2_min == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(pair_bounds(build_operator(diag3(2, 1, 0)), 4).o1_min == 0.75);

  const PairBounds c = pair_bounds(build_operator(Matrix::Identity(3, 3)), 3);
  CHECK(c.o1_min == 1.0);
  CHECK(c.mu == doctest::Approx(0.0).scale(1.0));
  CHECK(*c.r2_min == doctest::Approx(1.0));

  CHECK_FALSE(pair_bounds(build_operator(Matrix::Identity(2, 2)), 1).r2_min.has_value());
  CHECK_THROWS_AS(pair_bounds(build_operator(diag3(1, -1, 0)), 3), FrameError);
  CHECK_THROWS_AS(pair_bounds(build_operator(Matrix::Identity(2, 2)), 0), FrameError);
}

TEST_CASE("pair_bounds negative mu reports both formulas") {
  // K = I + 0.5 S is positive as a quadratic form with mu = -N(N-1) b^2.
  Matrix k{{1.0, 0.5}, {-0.5, 1.0}};
  const PairBounds p = pair_bounds(build_operator(k), 2);
  CHECK(p.branch == MuBranch::MuNeg);
  CHECK(p.mu == doctest::Approx(-0.5));
  CHECK(*p.r2_min == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
  REQUIRE(p.r2_min_statement_variant.has_value());
  CHECK(*p.r2_min_statement_variant == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
}

TEST_CASE("optimality predicates") {
  CHECK(is_o1_optimal_pair(mercedes()));
  CHECK(is_r1_optimal_pair(mercedes()));
  CHECK(is_r2_optimal_pair(mercedes()));
  CHECK(is_o1_optimal_pair(onb_self_dual(3)));
  CHECK(is_r1_optimal_pair(onb_self_dual(3)));
  CHECK(is_r2_optimal_pair(onb_self_dual(3)));

  const Frame f = build_frame({{1, 0, 0}, {1, 0, 0}, {std::sqrt(2.0), 0, 0}, {0, 1, 0}});
  const OperatorSpec op = build_operator(diag3(2, 1, 0));
  const DualSystem ex1 = make_dual_system(f, canonical_k_dual(f, op), op);
  CHECK_FALSE(is_o1_optimal_pair(ex1));
  CHECK_FALSE(is_r1_optimal_pair(ex1));

  const double h = 1.0 / std::sqrt(2.0);
  const Frame f2 = build_frame({{std::sqrt(2.0), 0, 0}, {std::sqrt(2.0), 0, 0}, {0, h, h}, {0, h, -h}});
  const OperatorSpec op2 = build_operator(diag3(2, 1, 1));
  const DualSystem ex2 = make_dual_system(f2, canonical_k_dual(f2, op2), op2);
  CHECK(is_o1_optimal_pair(ex2));
  CHECK(is_r1_optimal_pair(ex2));
}

TEST_CASE("1-uniform but not 2-uniform pair is not r2 optimal") {
  // Five harmonic vectors in the plane: equal diagonals, two distinct
  // off-diagonal products.
  const Frame f = uniform_parseval_frame(2, 5);
  const OperatorSpec op = build_operator(Matrix::Identity(2, 2));
  const DualSystem self = make_dual_system(f, f, op);
  REQUIRE(uniformity(self).c.has_value());
  CHECK_FALSE(uniformity(self).c_prime.has_value());
  CHECK(is_r1_optimal_pair(self));
  CHECK_FALSE(is_r2_optimal_pair(self));

  // Move inside the duals that keep every diagonal at tr(K)/N.
  const auto p = dual_parameterization(f, op);
  Matrix c(5, p.dof);
  for (int b = 0; b < p.dof; ++b)
    for (int i = 0; i < 5; ++i) c(i, b) = f.synthesis().col(i).dot(p.basis[b].col(i));
  const Matrix ns = null_space(c);
  REQUIRE(ns.cols() > 0);
  const DualSystem ds = make_dual_system(f, reconstruct_dual(p, 0.3 * ns.col(0)), op);
  CHECK(is_r1_optimal_pair(ds));
  CHECK_FALSE(is_r2_optimal_pair(ds));
}

TEST_CASE("predicates reject non-pairs") {
  // In the real case every K-dual is a pair, so a NotPair error can only be
  // observed for systems that are not duals at all, which make_dual_system
  // already refuses.
  const Frame f(Matrix::Identity(2, 2));
  CHECK_THROWS_AS(make_dual_system(f, Frame(2.0 * Matrix::Identity(2, 2)), build_operator(Matrix::Identity(2, 2))),
                  FrameError);
}

TEST_CASE("uniform_parseval_frame") {
  const Frame onb = uniform_parseval_frame(3, 3);
  CHECK(oracle::max_abs(frame_operator(onb) - Matrix::Identity(3, 3)) < 1e-14);
  CHECK(oracle::max_abs(column_sq_norms(onb.synthesis()) - Vector::Ones(3)) < 1e-14);

  const Frame mb = uniform_parseval_frame(2, 3);
  CHECK(oracle::max_abs(column_sq_norms(mb.synthesis()) - Vector::Constant(3, 2.0 / 3.0)) < 1e-14);
  CHECK(oracle::max_abs(frame_operator(mb) - Matrix::Identity(2, 2)) < 1e-14);

  const Frame h = uniform_parseval_frame(3, 4);
  CHECK(oracle::max_abs(column_sq_norms(h.synthesis()) - Vector::Constant(4, 0.75)) < 1e-12);
  CHECK(oracle::max_abs(frame_operator(h) - Matrix::Identity(3, 3)) < 1e-12);

  for (int n = 1; n <= 6; ++n)
    for (int big_n = n; big_n <= 12; ++big_n) {
      const Frame u = uniform_parseval_frame(n, big_n);
      CHECK(oracle::max_abs(frame_operator(u) - Matrix::Identity(n, n)) < 1e-12);
      CHECK(oracle::max_abs(column_sq_norms(u.synthesis()) -
                            Vector::Constant(big_n, double(n) / big_n)) < 1e-12);
    }
  CHECK_THROWS_AS(uniform_parseval_frame(3, 2), FrameError);
}

TEST_CASE("construct_optimal_self_dual") {
  const Frame t = construct_optimal_self_dual(build_operator(diag3(2, 1, 1)), 4);
  CHECK(oracle::max_abs(column_sq_norms(t.synthesis()) - Vector::Ones(4)) < 1e-9);
  CHECK(oracle::max_abs(frame_operator(t) - diag3(2, 1, 1)) < 1e-12);

  const Frame u = construct_optimal_self_dual(build_operator(Matrix::Identity(2, 2)), 5);
  CHECK(oracle::max_abs(column_sq_norms(u.synthesis()) - Vector::Constant(5, 0.4)) < 1e-9);

  const Frame z = construct_optimal_self_dual(build_operator(Matrix::Zero(2, 2)), 3);
  CHECK(z.synthesis().isZero());

  try {
    construct_optimal_self_dual(build_operator(Matrix::Identity(3, 3)), 2);
    FAIL("expected Infeasible");
  } catch (const FrameError& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }

  oracle::Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = oracle::uniform_int(1, 5, rng);
    const int r = oracle::uniform_int(0, n, rng);
    const Matrix k = oracle::random_psd(n, r, rng);
    const OperatorSpec op = build_operator(k);
    const int big_n = oracle::uniform_int(std::max(r, 1), 2 * n, rng);
    const Frame tf = construct_optimal_self_dual(op, big_n);
    const DualSystem ds = make_dual_system(tf, tf, op);
    CHECK(ds.kind() == DualKind::KDualPair);
    CHECK(oracle::max_abs(column_sq_norms(tf.synthesis()) - Vector::Constant(big_n, k.trace() / big_n)) <
          1e-9 * std::max(1.0, k.trace()));
    CHECK(is_o1_optimal_pair(ds));
    CHECK(is_r1_optimal_pair(ds));
  }
}

TEST_CASE("lower bounds hold for random pairs") {
  oracle::Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = oracle::uniform_int(1, 4, rng);
    const int r = oracle::uniform_int(1, n, rng);
    const Matrix k = oracle::random_psd(n, r, rng);
    const OperatorSpec op = build_operator(k);
    const int big_n = oracle::uniform_int(n, 2 * n + 1, rng);
    const Frame f = construct_optimal_self_dual(op, big_n);
    // G = T + W P^T with the columns of P spanning ker(T).
    const Matrix p = null_space(f.synthesis());
    const Matrix w = oracle::uniform(0.0, 1.0, rng) * oracle::gaussian(n, static_cast<int>(p.cols()), rng);
    const Frame g(f.synthesis() + w * p.transpose());
    const DualSystem ds = make_dual_system(f, g, op);
    REQUIRE(ds.kind() == DualKind::KDualPair);
    const double bound = k.trace() / big_n;
    CHECK(o1(ds).value >= bound - 1e-9);
    CHECK(r1(ds).value >= bound - 1e-9);
    if (is_o1_optimal_pair(ds)) CHECK(uniformity(ds).c.has_value());
  }
}

TEST_CASE("2-uniform pairs satisfy c' = mu / (N (N - 1))") {
  const DualSystem m = mercedes();
  const auto u = uniformity(m);
  const PairBounds b = pair_bounds(m.op(), 3);
  CHECK(*u.c_prime == doctest::Approx(b.mu / 6.0).epsilon(1e-9));

  // Harmonic frames with K = I are 2-uniform only in special cases; the ONB is.
  const DualSystem onb = onb_self_dual(4);
  CHECK(*uniformity(onb).c_prime == doctest::Approx(pair_bounds(onb.op(), 4).mu / 12.0).scale(1.0));
}

TEST_CASE("unitary_transport") {
  const DualSystem m = mercedes();
  const DualSystem same = unitary_transport(m, Matrix::Identity(2, 2));
  CHECK(same.frame().synthesis() == m.frame().synthesis());

  const double th = 0.7;
  Matrix rot{{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}};
  const DualSystem r = unitary_transport(m, rot);
  const ErasureReport a = erasure_report(m);
  const ErasureReport b = erasure_report(r);
  CHECK(a.o1 == doctest::Approx(b.o1).epsilon(1e-12));
  CHECK(a.r1 == doctest::Approx(b.r1).epsilon(1e-12));
  CHECK(*a.r2 == doctest::Approx(*b.r2).epsilon(1e-12));

  const double h = 1.0 / std::sqrt(2.0);
  const Frame f2 = build_frame({{std::sqrt(2.0), 0, 0}, {std::sqrt(2.0), 0, 0}, {0, h, h}, {0, h, -h}});
  const OperatorSpec op2 = build_operator(diag3(2, 1, 1));
  const DualSystem ex2 = make_dual_system(f2, canonical_k_dual(f2, op2), op2);
  Matrix blk = Matrix::Identity(3, 3);
  blk.bottomRightCorner(2, 2) = rot;
  const DualSystem t2 = unitary_transport(ex2, blk);
  CHECK(o1(t2).value == doctest::Approx(o1(ex2).value).epsilon(1e-12));
  CHECK(r2_closed_form(t2).value == doctest::Approx(r2_closed_form(ex2).value).epsilon(1e-12));

  Matrix full(3, 3);
  full << std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1;
  try {
    unitary_transport(ex2, full);
    FAIL("expected DoesNotCommute");
  } catch (const FrameError& e) {
    CHECK(e.code() == ErrorCode::DoesNotCommute);
  }
  try {
    unitary_transport(ex2, 2.0 * Matrix::Identity(3, 3));
    FAIL("expected NotOrthogonal");
  } catch (const FrameError& e) {
    CHECK(e.code() == ErrorCode::NotOrthogonal);
  }
}
