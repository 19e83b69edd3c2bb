#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "framekit/error.hpp"
#include "framekit/frame.hpp"
#include "framekit/linalg.hpp"
#include "oracles.hpp"

using namespace framekit;

namespace {

Frame example_one() {
  const double r2 = std::sqrt(2.0);
  return build_frame({{1, 0, 0}, {1, 0, 0}, {r2, 0, 0}, {0, 1, 0}});
}

Frame example_two() {
  const double h = 1.0 / std::sqrt(2.0);
  return build_frame({{std::sqrt(2.0), 0, 0}, {std::sqrt(2.0), 0, 0}, {0, h, h}, {0, h, -h}});
}

Matrix diag3(double a, double b, double c) { return Vector{{a, b, c}}.asDiagonal(); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const FrameError& e) {
    return e.code();
  }
  FAIL("no FrameError thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("build_frame assembles columns and rejects bad input") {
  const Frame f = example_one();
  CHECK(f.dim() == 3);
  CHECK(f.size() == 4);
  CHECK(f.synthesis()(0, 2) == std::sqrt(2.0));

  const Frame id = build_frame({{1, 0}, {0, 1}});
  CHECK(id.synthesis() == Matrix::Identity(2, 2));

  CHECK(code_of([] { build_frame({}); }) == ErrorCode::EmptyInput);
  CHECK(code_of([] { build_frame({{1, 0}, {1}}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { build_frame({{1, std::nan("")}}); }) == ErrorCode::NonFinite);
}

TEST_CASE("build_operator caches pinv, traces and psd flag") {
  const OperatorSpec a = build_operator(diag3(2, 1, 0));
  CHECK(oracle::max_abs(a.pinv() - diag3(0.5, 1, 0)) == 0.0);
  CHECK(a.trace() == 3.0);
  CHECK(a.trace_sq() == 5.0);
  CHECK(a.psd());
  CHECK(a.rank() == 2);

  const OperatorSpec id = build_operator(Matrix::Identity(4, 4));
  CHECK(oracle::max_abs(id.pinv() - Matrix::Identity(4, 4)) < 1e-15);
  REQUIRE(id.sqrt().has_value());
  CHECK(oracle::max_abs(*id.sqrt() - Matrix::Identity(4, 4)) < 1e-14);

  const OperatorSpec b = build_operator(diag3(2, 1, 1));
  CHECK(oracle::max_abs(b.pinv() - diag3(0.5, 1, 1)) < 1e-15);
  CHECK(b.trace() == 4.0);

  CHECK(code_of([] { build_operator(Matrix::Ones(2, 3)); }) == ErrorCode::NotSquare);

  Matrix skew{{1, 1}, {-1, 1}};
  const OperatorSpec s = build_operator(skew);
  CHECK_FALSE(s.psd());
  CHECK(s.positive_form());
  CHECK_FALSE(s.sqrt().has_value());

  const OperatorSpec neg = build_operator(diag3(1, -1, 0));
  CHECK_FALSE(neg.psd());
  CHECK_FALSE(neg.positive_form());
}

TEST_CASE("Penrose identities hold for random operators") {
  oracle::Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const int n = oracle::uniform_int(1, 5, rng);
    const int r = oracle::uniform_int(0, n, rng);
    const Matrix k = oracle::gaussian(n, r, rng) * oracle::gaussian(r, n, rng);
    const OperatorSpec op = build_operator(k);
    const Matrix& p = op.pinv();
    const double scale = std::max(1.0, k.norm() * p.norm());
    CHECK(oracle::max_abs(k * p * k - k) <= 1e-9 * scale * std::max(1.0, k.norm()));
    CHECK(oracle::max_abs(p * k * p - p) <= 1e-9 * scale * std::max(1.0, p.norm()));
    CHECK(oracle::max_abs((k * p).transpose() - k * p) <= 1e-9 * scale);
    CHECK(oracle::max_abs((p * k).transpose() - p * k) <= 1e-9 * scale);
  }
}

TEST_CASE("psd sqrt squares back to K") {
  oracle::Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const int n = oracle::uniform_int(1, 5, rng);
    const Matrix k = oracle::random_psd(n, oracle::uniform_int(0, n, rng), rng);
    const OperatorSpec op = build_operator(k);
    REQUIRE(op.psd());
    REQUIRE(op.sqrt().has_value());
    CHECK(oracle::max_abs(*op.sqrt() * *op.sqrt() - k) <= 1e-9 * std::max(1.0, k.norm()));
  }
}

TEST_CASE("frame_operator examples and spectral norm") {
  CHECK(oracle::max_abs(frame_operator(example_one()) - diag3(4, 1, 0)) < 1e-15);
  CHECK(oracle::max_abs(frame_operator(example_two()) - diag3(4, 1, 1)) < 1e-15);
  CHECK(frame_operator(build_frame({{1, 0}, {0, 1}})) == Matrix::Identity(2, 2));

  oracle::Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    const Matrix m = oracle::gaussian(oracle::uniform_int(1, 5, rng), oracle::uniform_int(1, 8, rng), rng);
    const double s = oracle::op_norm(m);
    CHECK(oracle::op_norm(frame_operator(Frame(m))) == doctest::Approx(s * s).epsilon(1e-10));
  }
}

TEST_CASE("k_frame_bounds") {
  const auto b = k_frame_bounds(example_one(), build_operator(diag3(2, 1, 0)));
  REQUIRE(b.has_value());
  CHECK(b->lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b->upper == doctest::Approx(4.0).epsilon(1e-12));

  const auto onb = k_frame_bounds(build_frame({{1, 0}, {0, 1}}), build_operator(Matrix::Identity(2, 2)));
  REQUIRE(onb.has_value());
  CHECK(onb->lower == doctest::Approx(1.0));
  CHECK(onb->upper == doctest::Approx(1.0));

  const Frame zero(Matrix::Zero(2, 3));
  CHECK_FALSE(k_frame_bounds(zero, build_operator(Matrix::Identity(2, 2))).has_value());

  const auto kz = k_frame_bounds(zero, build_operator(Matrix::Zero(2, 2)));
  REQUIRE(kz.has_value());
  CHECK(kz->lower == std::numeric_limits<double>::infinity());

  CHECK(code_of([] { k_frame_bounds(example_one(), build_operator(Matrix::Identity(2, 2))); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("is_parseval_k_frame") {
  CHECK(is_parseval_k_frame(example_one(), build_operator(diag3(2, 1, 0))));
  CHECK(is_parseval_k_frame(example_two(), build_operator(diag3(2, 1, 1))));
  CHECK_FALSE(is_parseval_k_frame(build_frame({{1, 0}, {0, 1}}), build_operator(2.0 * Matrix::Identity(2, 2))));

  oracle::Rng rng(14);
  for (int t = 0; t < 20; ++t) {
    const int n = oracle::uniform_int(1, 4, rng);
    const Matrix k = oracle::random_psd(n, n, rng);
    CHECK(is_parseval_k_frame(oracle::random_parseval_k_frame(k, n + 2, rng), build_operator(k)));
  }
}

TEST_CASE("canonical_k_dual") {
  const Frame g = canonical_k_dual(example_one(), build_operator(diag3(2, 1, 0)));
  const Matrix expect = build_frame({{0.5, 0, 0}, {0.5, 0, 0}, {std::sqrt(0.5), 0, 0}, {0, 1, 0}}).synthesis();
  CHECK(g.synthesis() == expect);

  const double h = 1.0 / std::sqrt(2.0);
  const Frame g2 = canonical_k_dual(example_two(), build_operator(diag3(2, 1, 1)));
  const Matrix expect2 = build_frame({{h, 0, 0}, {h, 0, 0}, {0, h, h}, {0, h, -h}}).synthesis();
  CHECK(oracle::max_abs(g2.synthesis() - expect2) < 1e-15);

  const Frame onb = build_frame({{1, 0}, {0, 1}});
  CHECK(canonical_k_dual(onb, build_operator(Matrix::Identity(2, 2))).synthesis() == onb.synthesis());

  CHECK(code_of([&] { canonical_k_dual(onb, build_operator(2.0 * Matrix::Identity(2, 2))); }) ==
        ErrorCode::NotParseval);
}

TEST_CASE("standard_k_dual is a K-dual of any K-frame") {
  oracle::Rng rng(15);
  for (int t = 0; t < 30; ++t) {
    const int n = oracle::uniform_int(1, 4, rng);
    const Matrix k = oracle::random_psd(n, oracle::uniform_int(1, n, rng), rng);
    const Frame f(oracle::gaussian(n, n + oracle::uniform_int(0, 3, rng), rng));
    const OperatorSpec op = build_operator(k);
    CHECK(verify_k_dual(f, standard_k_dual(f, op), op) == DualKind::KDualPair);
  }
}

TEST_CASE("verify_k_dual classification") {
  const Frame f = example_one();
  const OperatorSpec op = build_operator(diag3(2, 1, 0));
  CHECK(verify_k_dual(f, canonical_k_dual(f, op), op) == DualKind::KDualPair);
  CHECK(verify_k_dual(f, f, op) == DualKind::NotDual);
  const Frame onb = build_frame({{1, 0}, {0, 1}});
  CHECK(verify_k_dual(onb, onb, build_operator(Matrix::Identity(2, 2))) == DualKind::KDualPair);
  CHECK(code_of([&] { verify_k_dual(f, onb, op); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { make_dual_system(f, f, op); }) == ErrorCode::NotDual);
}

TEST_CASE("dual_parameterization dof and validity") {
  const OperatorSpec op1 = build_operator(diag3(2, 1, 0));
  CHECK(dual_parameterization(example_one(), op1).dof == 6);
  CHECK(dual_parameterization(example_two(), build_operator(diag3(2, 1, 1))).dof == 3);
  const auto onb = dual_parameterization(build_frame({{1, 0}, {0, 1}}), build_operator(Matrix::Identity(2, 2)));
  CHECK(onb.dof == 0);
  CHECK(onb.basis.empty());

  oracle::Rng rng(16);
  for (int t = 0; t < 40; ++t) {
    const int n = oracle::uniform_int(1, 4, rng);
    const int big_n = n + oracle::uniform_int(0, 4, rng);
    const Matrix k = oracle::random_psd(n, oracle::uniform_int(0, n, rng), rng);
    const OperatorSpec op = build_operator(k);
    const Frame f = oracle::random_parseval_k_frame(k, big_n, rng);
    const auto p = dual_parameterization(f, op);
    CHECK(p.dof == n * (big_n - numeric_rank(f.synthesis())));
    for (size_t a = 0; a < p.basis.size(); ++a)
      for (size_t b = 0; b < p.basis.size(); ++b) {
        const double ip = (p.basis[a].array() * p.basis[b].array()).sum();
        CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-10));
      }
    const Frame g = oracle::random_dual(p, 1.0, rng);
    CHECK(verify_k_dual(f, g, op) != DualKind::NotDual);
    const DualSystem ds = make_dual_system(f, g, op);
    CHECK(ds.cross_gram().trace() == doctest::Approx(k.trace()).epsilon(1e-9).scale(1.0));
    CHECK((ds.cross_gram() * ds.cross_gram()).trace() ==
          doctest::Approx((k * k).trace()).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("zero dof means the canonical dual is the only dual") {
  oracle::Rng rng(17);
  const Matrix k = oracle::random_psd(3, 3, rng);
  const OperatorSpec op = build_operator(k);
  const Frame f = oracle::random_parseval_k_frame(k, 3, rng);
  const auto p = dual_parameterization(f, op);
  REQUIRE(p.dof == 0);
  const Frame g = reconstruct_dual(p, Vector());
  CHECK(oracle::max_abs(g.synthesis() - canonical_k_dual(f, op).synthesis()) < 1e-12);
  // Any other candidate fails duality.
  for (int t = 0; t < 10; ++t) {
    const Frame other(canonical_k_dual(f, op).synthesis() + 1e-3 * oracle::gaussian(3, 3, rng));
    CHECK(verify_k_dual(f, other, op) == DualKind::NotDual);
  }
}
