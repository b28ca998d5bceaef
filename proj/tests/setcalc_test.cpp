#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tubeuav/setcalc/lp.hpp"
#include "tubeuav/setcalc/mrpi.hpp"
#include "tubeuav/setcalc/polytope.hpp"

namespace tubeuav::setcalc {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::convex_hull_2d;
using testing::mrpi_by_iteration_2d;

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// A polytope that is a box but not tagged as one (an extra redundant row
// defeats the axis-aligned detection), so generic code paths run.
Polytope generic_box(const VectorXd& half) {
  const int n = half.size();
  MatrixXd A(2 * n + 1, n);
  VectorXd b(2 * n + 1);
  A << MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n), VectorXd::Ones(n).transpose();
  b << half, half, 10.0 * half.sum() + 1.0;
  return Polytope(A, b);
}

TEST(Lp, StandardFormSmallProblem) {
  // min -x1 - x2 s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6.
  VectorXd c = vec({-1, -1, 0, 0});
  MatrixXd E(2, 4);
  E << 1, 2, 1, 0, 3, 1, 0, 1;
  const auto res = solve_standard_form(c, E, vec({4, 6}));
  ASSERT_EQ(res.status, LpStatus::kOptimal);
  EXPECT_NEAR(res.value, -2.8, 1e-12);
  EXPECT_NEAR(res.y(0), 1.6, 1e-12);
  EXPECT_NEAR(res.y(1), 1.2, 1e-12);
}

TEST(Lp, DetectsInfeasibleAndUnbounded) {
  MatrixXd A(2, 1);
  A << 1, -1;
  EXPECT_EQ(maximize_over_halfspaces(A, vec({-1, -1}), vec({1})).status, LpStatus::kInfeasible);
  MatrixXd half(1, 1);
  half << 1;
  EXPECT_EQ(maximize_over_halfspaces(half, vec({1}), vec({-1})).status, LpStatus::kUnbounded);
}

TEST(Support, BoxExamples) {
  const Polytope unit = Polytope::box(vec({1, 1}));
  EXPECT_DOUBLE_EQ(support(unit, vec({1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(support(unit, vec({1, 1})), 2.0);
  EXPECT_DOUBLE_EQ(support(Polytope::box(vec({0.9, 0.5})), vec({0, -1})), 0.5);
}

TEST(Support, GenericPathMatchesBox) {
  const Polytope g = generic_box(vec({0.9, 0.5}));
  ASSERT_FALSE(g.is_box());
  EXPECT_NEAR(support(g, vec({1, 0})), 0.9, 1e-12);
  EXPECT_NEAR(support(g, vec({1, 1})), 1.4, 1e-12);
  EXPECT_NEAR(support(g, vec({0, -1})), 0.5, 1e-12);
}

TEST(Support, ErrorsOnUnboundedAndEmpty) {
  MatrixXd A(1, 2);
  A << 1, 0;
  const Polytope halfplane(A, vec({1}));
  EXPECT_THROW(support(halfplane, vec({0, 1})), SetError);
  MatrixXd B(3, 2);
  B << 1, 0, -1, 0, 0, 1;
  EXPECT_THROW(support(Polytope(B, vec({-1, -1, 1})), vec({1, 0})), SetError);
  EXPECT_THROW(support(Polytope::box(vec({1, 1})), vec({0, 0})), SetError);
}

TEST(Support, IsSublinear) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  MatrixXd A(7, 3);
  for (auto& a : A.reshaped()) a = g(rng);
  VectorXd b = VectorXd::Ones(7);
  Polytope p = Polytope(A, b).intersect(Polytope::box(vec({2, 2, 2})));
  for (int k = 0; k < 200; ++k) {
    VectorXd d1(3), d2(3);
    for (int j = 0; j < 3; ++j) {
      d1(j) = g(rng);
      d2(j) = g(rng);
    }
    EXPECT_LE(p.support(d1 + d2), p.support(d1) + p.support(d2) + 1e-9);
  }
}

TEST(MinkowskiSum, BoxIdentities) {
  const Polytope s = minkowski_sum(Polytope::box(vec({1, 1})), Polytope::box(vec({0.5, 0.5})));
  ASSERT_TRUE(s.is_box());
  EXPECT_LE((s.axis_bounds()->upper - vec({1.5, 1.5})).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((s.axis_bounds()->lower + vec({1.5, 1.5})).cwiseAbs().maxCoeff(), 1e-12);

  const Polytope one = minkowski_sum(Polytope::box(vec({1})), Polytope::box(vec({2})));
  EXPECT_NEAR(one.support(vec({1})), 3.0, 1e-12);
  EXPECT_NEAR(one.support(vec({-1})), 3.0, 1e-12);

  const Polytope p = Polytope::box(vec({1, 0.3}));
  EXPECT_LE(hausdorff_distance(minkowski_sum(p, Polytope::origin(2)), p), 1e-12);
}

TEST(MinkowskiSum, GenericAgreesWithBoxFastPath) {
  const VectorXd a = vec({1, 0.4, 2});
  const VectorXd b = vec({0.5, 0.1, 0.25});
  const Polytope fast = minkowski_sum(Polytope::box(a), Polytope::box(b));
  const Polytope slow = minkowski_sum_generic(generic_box(a), generic_box(b));
  for (const auto& d : metric_directions(3)) {
    EXPECT_NEAR(fast.support(d), slow.support(d), 1e-12);
  }
}

TEST(MinkowskiSum, TriangleAndSquareMatchesHullOracle) {
  MatrixXd A(3, 2);
  A << -1, 0, 0, -1, 1, 1;
  const Polytope tri(A, vec({0, 0, 1}));
  const Polytope sq = Polytope::box(vec({0.5, 0.5}));
  const Polytope sum = minkowski_sum(tri, sq);
  std::vector<Eigen::Vector2d> pts;
  for (const auto& v : tri.vertices()) {
    for (const auto& w : sq.vertices()) pts.push_back(v + w);
  }
  const auto hull = convex_hull_2d(pts);
  for (int k = 0; k < 360; ++k) {
    const Eigen::Vector2d d(std::cos(k * M_PI / 180), std::sin(k * M_PI / 180));
    EXPECT_NEAR(sum.support(d), testing::support_of_points(hull, d), 1e-12);
  }
  EXPECT_EQ(sum.rows(), 5);
}

TEST(MinkowskiSum, DimensionMismatchThrows) {
  EXPECT_THROW(minkowski_sum(Polytope::box(vec({1})), Polytope::box(vec({1, 1}))), SetError);
}

TEST(PontryaginDiff, BoxExamples) {
  const Polytope z = pontryagin_diff(Polytope::box(vec({1, 1})), Polytope::box(vec({0.1, 0.1})));
  ASSERT_TRUE(z.is_box());
  EXPECT_LE((z.axis_bounds()->upper - vec({0.9, 0.9})).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((z.axis_bounds()->lower + vec({0.9, 0.9})).cwiseAbs().maxCoeff(), 1e-12);

  const Polytope p = Polytope::box(vec({1, 2}));
  EXPECT_LE(hausdorff_distance(pontryagin_diff(p, Polytope::origin(2)), p), 1e-12);

  EXPECT_THROW(pontryagin_diff(Polytope::box(vec({1, 1})), Polytope::box(vec({1.5, 1.5}))),
               EmptyTightenedSet);
}

TEST(PontryaginDiff, ThenMinkowskiUnderApproximates) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd A(6, 2);
    for (auto& a : A.reshaped()) a = g(rng);
    const Polytope p = Polytope(A, VectorXd::Constant(6, 2.0))
                           .intersect(Polytope::box(vec({3, 3})))
                           .without_redundant_rows();
    MatrixXd B(4, 2);
    for (auto& a : B.reshaped()) a = g(rng);
    const Polytope q = Polytope(B, VectorXd::Constant(4, 0.2))
                           .intersect(Polytope::box(vec({0.3, 0.3})))
                           .without_redundant_rows();
    const Polytope recombined = minkowski_sum(pontryagin_diff(p, q), q);
    for (int i = 0; i < p.rows(); ++i) {
      EXPECT_LE(recombined.support(p.normals().row(i).transpose()), p.offsets()(i) + 1e-9);
    }
  }
}

TEST(LinearMap, ScalingAndSymmetry) {
  const Polytope scaled = linear_map(Polytope::box(vec({1, 1})), 2.0 * MatrixXd::Identity(2, 2));
  EXPECT_LE(hausdorff_distance(scaled, Polytope::box(vec({2, 2}))), 1e-12);
  const Polytope flipped = linear_map(Polytope::box(vec({1})), -MatrixXd::Identity(1, 1));
  EXPECT_LE(hausdorff_distance(flipped, Polytope::box(vec({1}))), 1e-12);
}

TEST(LinearMap, RotationMatchesVertexImageOracle) {
  const double th = M_PI / 2;
  Eigen::Matrix2d rot;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Polytope src = Polytope::box(vec({1, 1}));
  const Polytope img = linear_map(src, rot);
  std::vector<Eigen::Vector2d> mapped;
  for (const auto& v : src.vertices()) mapped.push_back(rot * v);
  for (const auto& v : mapped) EXPECT_TRUE(img.contains(v, 1e-12));
  EXPECT_LE(hausdorff_distance(img, Polytope::box(vec({1, 1}))), 1e-12);
}

TEST(LinearMap, ProjectionsMatchVertexImages) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  MatrixXd A(9, 3);
  for (auto& a : A.reshaped()) a = g(rng);
  const Polytope p = Polytope(A, VectorXd::Ones(9)).intersect(Polytope::box(vec({1, 2, 1})));
  MatrixXd m2(2, 3);
  for (auto& a : m2.reshaped()) a = g(rng);
  const Polytope img = linear_map(p, m2);
  std::vector<Eigen::Vector2d> pts;
  for (const auto& v : p.vertices()) pts.push_back(m2 * v);
  const auto hull = convex_hull_2d(pts);
  for (int k = 0; k < 180; ++k) {
    const Eigen::Vector2d d(std::cos(k * M_PI / 90), std::sin(k * M_PI / 90));
    EXPECT_NEAR(img.support(d), testing::support_of_points(hull, d), 1e-9);
  }
  MatrixXd m1 = MatrixXd::Ones(1, 3);
  const Polytope line = linear_map(p, m1);
  EXPECT_NEAR(line.support(vec({1})), p.support(VectorXd::Ones(3)), 1e-12);
}

TEST(LinearMap, RankDeficientSquareThrows) {
  MatrixXd m(2, 2);
  m << 1, 2, 2, 4;
  EXPECT_THROW(linear_map(Polytope::box(vec({1, 1})), m), SetError);
}

TEST(Mrpi, HalfIdentityConvergesToBoxTwo) {
  const auto t0 = std::chrono::steady_clock::now();
  const MatrixXd a = 0.5 * MatrixXd::Identity(2, 2);
  const auto res = mrpi_approx(a, Polytope::box(vec({1, 1})), 1e-4);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(hausdorff_distance(res.set, Polytope::box(vec({2, 2}))), 1e-3);
  EXPECT_TRUE(res.exact);
  EXPECT_LT(secs, 1.0);

  // Brute-force set iteration agrees.
  std::vector<Eigen::Vector2d> w{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  const auto oracle = mrpi_by_iteration_2d(Eigen::Matrix2d(a), w);
  for (int k = 0; k < 64; ++k) {
    const Eigen::Vector2d d(std::cos(k * M_PI / 32), std::sin(k * M_PI / 32));
    EXPECT_NEAR(res.set.support(d), testing::support_of_points(oracle, d), 1e-3);
    EXPECT_GE(res.set.support(d), testing::support_of_points(oracle, d) - 1e-9);
  }
}

TEST(Mrpi, ZeroDynamicsAbsorbsInOneStep) {
  const Polytope w = Polytope::box(vec({0.3, 0.7}));
  const auto res = mrpi_approx(MatrixXd::Zero(2, 2), w, 1e-3);
  EXPECT_EQ(res.terms, 1);
  EXPECT_LE(hausdorff_distance(res.set, w), 1e-12);
}

TEST(Mrpi, ScalarGeometricSeries) {
  MatrixXd a(1, 1);
  a << 0.9;
  const auto res = mrpi_approx(a, Polytope::box(vec({1})), 1e-6);
  EXPECT_NEAR(res.set.support(vec({1})), 10.0, 1e-5);
  EXPECT_NEAR(res.set.support(vec({-1})), 10.0, 1e-5);
}

TEST(Mrpi, RotatingContractionMatchesIterationOracle) {
  Eigen::Matrix2d a;
  a << 0.6, -0.5, 0.4, 0.7;
  ASSERT_LT(spectral_radius(a), 1.0);
  const std::vector<Eigen::Vector2d> w{{0.2, 0.1}, {0.2, -0.1}, {-0.2, 0.1}, {-0.2, -0.1}};
  const double eps = 1e-4;
  const auto res = mrpi_approx(a, Polytope::box(vec({0.2, 0.1})), eps);
  const auto oracle = mrpi_by_iteration_2d(a, w, 1e-10);
  for (int k = 0; k < 128; ++k) {
    const Eigen::Vector2d d(std::cos(k * M_PI / 64), std::sin(k * M_PI / 64));
    const double exact = testing::support_of_points(oracle, d);
    EXPECT_GE(res.set.support(d), exact - 1e-9);
    EXPECT_LE(res.set.support(d), exact + eps * d.lpNorm<1>() + 1e-9);
  }
}

TEST(Mrpi, ErrorPaths) {
  EXPECT_THROW(mrpi_approx(1.1 * MatrixXd::Identity(2, 2), Polytope::box(vec({1, 1})), 1e-3),
               SetError);
  MatrixXd slow(1, 1);
  slow << 0.999;
  MrpiOptions opts;
  opts.max_terms = 10;
  EXPECT_THROW(mrpi_approx(slow, Polytope::box(vec({1})), 1e-6, opts), NonConvergent);
}

TEST(Mrpi, RobustInvarianceBySampling) {
  Eigen::Matrix2d a;
  a << 0.6, -0.5, 0.4, 0.7;
  const Polytope w = Polytope::box(vec({0.2, 0.1}));
  const auto res = mrpi_approx(a, w, 1e-3);
  std::mt19937_64 rng(2024);
  const auto xs = testing::hit_and_run(res.set, 1000, rng);
  const auto wv = w.vertices();
  for (const auto& x : xs) {
    const VectorXd next = a * x + testing::vertex_weighted_sample(wv, rng);
    EXPECT_TRUE(res.set.contains(next, 1e-9));
  }
  // The vertices of S are the hardest points.
  for (const auto& v : res.set.vertices()) {
    for (const auto& q : wv) EXPECT_TRUE(res.set.contains(a * v + q, 1e-9));
  }
}

TEST(Mrpi, MonotoneInEps) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  int checked = 0;
  while (checked < 10) {
    Eigen::Matrix2d a;
    a << u(rng), u(rng), u(rng), u(rng);
    if (spectral_radius(a) > 0.9) continue;
    const Polytope w = Polytope::box(vec({0.3, 0.1}));
    const auto tight = mrpi_approx(a, w, 1e-5);
    const auto loose = mrpi_approx(a, w, 1e-2);
    EXPECT_TRUE(is_subset(tight.set, loose.set, 1e-9));
    ++checked;
  }
}

TEST(Mrpi, HighDimensionalTemplateIsOuterBound) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  MatrixXd a(5, 5);
  for (auto& x : a.reshaped()) x = u(rng);
  a += 0.5 * MatrixXd::Identity(5, 5);
  ASSERT_LT(spectral_radius(a), 1.0);
  const VectorXd half = vec({1e-2, 1e-6, 1e-6, 1e-6, 1e-3});
  const auto res = mrpi_approx(a, Polytope::box(half), 1e-3);
  // Forward simulation from the origin must stay inside.
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  VectorXd x = VectorXd::Zero(5);
  for (int k = 0; k < 2000; ++k) {
    VectorXd w(5);
    for (int j = 0; j < 5; ++j) w(j) = half(j) * (unit(rng) > 0 ? 1.0 : -1.0);
    x = a * x + w;
    ASSERT_TRUE(res.set.contains(x, 1e-12)) << "step " << k;
  }
}

TEST(Hausdorff, UsesDeterministicDirections) {
  const auto& d1 = metric_directions(3);
  const auto& d2 = metric_directions(3);
  ASSERT_EQ(d1.size(), 64u);
  for (std::size_t i = 0; i < d1.size(); ++i) EXPECT_EQ(d1[i], d2[i]);
  EXPECT_NEAR(hausdorff_distance(Polytope::box(vec({1, 1})), Polytope::box(vec({1.5, 1}))), 0.5,
              1e-12);
}

}  // namespace
}  // namespace tubeuav::setcalc
