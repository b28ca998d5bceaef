#include <chrono>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tubeuav/setcalc/mrpi.hpp"
#include "tubeuav/trmpc/dare.hpp"
#include "tubeuav/trmpc/gain.hpp"
#include "tubeuav/trmpc/lmi.hpp"
#include "tubeuav/trmpc/qp.hpp"
#include "tubeuav/trmpc/synthesis.hpp"
#include "tubeuav/trmpc/tube_mpc.hpp"
#include "uav_fixture.hpp"

namespace tubeuav::trmpc {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using setcalc::Polytope;
using tubeuav::testing::lateral_setup;
using tubeuav::testing::longitudinal_setup;

constexpr double kDeg = M_PI / 180.0;

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }
VectorXd vec1(double v) { return VectorXd::Constant(1, v); }

airframe::LinearModel scalar_model(double a, double b, double dt = 0.1) {
  airframe::LinearModel m;
  m.A = scalar(a);
  m.B = scalar(b);
  m.C = scalar(1.0);
  m.state_names = {"x"};
  m.input_names = {"u"};
  m.dt = dt;
  return m;
}

// Scalar Riccati recursion run to a fixed point.
double scalar_dare_by_iteration(double a, double b, double q, double r) {
  double p = q;
  for (int i = 0; i < 100000; ++i) {
    const double next = q + a * a * p - a * a * p * p * b * b / (r + b * b * p);
    if (std::abs(next - p) < 1e-15) return next;
    p = next;
  }
  return p;
}

TEST(Dare, ScalarMatchesFixedPointIteration) {
  const MatrixXd p = solve_dare(scalar(0.5), scalar(1), scalar(1), scalar(1));
  const double oracle = scalar_dare_by_iteration(0.5, 1, 1, 1);
  EXPECT_NEAR(p(0, 0), oracle, 1e-12);
  EXPECT_NEAR(p(0, 0), 1.132782, 1e-6);
  EXPECT_LT(dare_residual(scalar(0.5), scalar(1), scalar(1), scalar(1), p), 1e-12);
}

TEST(Dare, DeadbeatAndLyapunovCases) {
  EXPECT_NEAR(solve_dare(scalar(0), scalar(3), scalar(2.5), scalar(1))(0, 0), 2.5, 1e-12);
  EXPECT_NEAR(solve_dare(scalar(0.5), scalar(0), scalar(1), scalar(1))(0, 0), 4.0 / 3.0, 1e-12);
}

TEST(Dare, RejectsNonStabilizablePairs) {
  EXPECT_THROW(solve_dare(scalar(2), scalar(0), scalar(1), scalar(1)), SynthesisError);
  EXPECT_THROW(solve_dare(scalar(0.5), scalar(1), scalar(1), scalar(0)), SynthesisError);
}

TEST(Dare, ResidualOnUavPlants) {
  for (const auto* s : {&longitudinal_setup(), &lateral_setup()}) {
    const MatrixXd p = solve_dare(s->model_d.A, s->model_d.B, s->weights.Q, s->weights.R);
    EXPECT_LT(dare_residual(s->model_d.A, s->model_d.B, s->weights.Q, s->weights.R, p), 1e-9);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(p).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Lyapunov, SolvesDiscreteEquation) {
  MatrixXd a(2, 2);
  a << 0.5, 0.2, -0.1, 0.7;
  MatrixXd q(2, 2);
  q << 2, 0.3, 0.3, 1;
  const MatrixXd x = solve_discrete_lyapunov(a, q);
  EXPECT_LT((a.transpose() * x * a + q - x).norm(), 1e-12);
}

TEST(Gain, SingleVertexIsDlqr) {
  const auto& s = longitudinal_setup();
  const auto cert = synthesize_gain({s.model_d}, s.weights.Q, s.weights.R);
  const MatrixXd p = solve_dare(s.model_d.A, s.model_d.B, s.weights.Q, s.weights.R);
  EXPECT_EQ(cert.method, GainMethod::kLqr);
  EXPECT_LT((cert.K - lqr_gain(s.model_d.A, s.model_d.B, s.weights.R, p)).norm(), 1e-9);
  ASSERT_EQ(cert.vertex_radii.size(), 1u);
}

TEST(Gain, ScalarFamilyHasStableCorners) {
  const auto cert = synthesize_gain({scalar_model(0.9, 1), scalar_model(1.1, 1)}, scalar(1), scalar(1));
  // The feasible set for |a + k| < 1 at both corners is k ∈ (−1.9, −0.1).
  EXPECT_GT(cert.K(0, 0), -1.9);
  EXPECT_LT(cert.K(0, 0), -0.1);
  for (double r : cert.vertex_radii) EXPECT_LT(r, 1.0);
}

TEST(Gain, AlreadyStableVerticesAccepted) {
  const auto cert = synthesize_gain({scalar_model(0.5, 1), scalar_model(0.6, 1)}, scalar(1e-9), scalar(1));
  EXPECT_EQ(cert.method, GainMethod::kLqr);
  EXPECT_NEAR(cert.K(0, 0), 0.0, 1e-6);
}

TEST(Gain, FallsBackToLmiWhenLqrFailsSomeVertex) {
  // LQR on (2, 1) gives k ≈ −1.618, which leaves 2 + 0.5k > 1. Both
  // corners are stable exactly for k ∈ (−3, −2).
  const auto cert = synthesize_gain({scalar_model(2, 1), scalar_model(2, 0.5)}, scalar(1), scalar(1));
  EXPECT_EQ(cert.method, GainMethod::kQuadraticStability);
  EXPECT_GT(cert.K(0, 0), -3.0);
  EXPECT_LT(cert.K(0, 0), -2.0);
  EXPECT_LT(cert.worst_radius(), 1.0);
  // Terminal cost is the closed-loop Lyapunov solution.
  const double ak = 2 + cert.K(0, 0);
  EXPECT_NEAR(cert.P(0, 0), (1 + cert.K(0, 0) * cert.K(0, 0)) / (1 - ak * ak), 1e-9);
}

TEST(Gain, ReportsWorstRadiusWhenNoGainExists) {
  // |2 + k| < 1 and |2 + 0.2k| < 1 have disjoint solution intervals.
  try {
    synthesize_gain({scalar_model(2, 1), scalar_model(2, 0.2)}, scalar(1), scalar(1));
    FAIL() << "expected GainSynthesisError";
  } catch (const GainSynthesisError& e) {
    EXPECT_GT(e.worst_radius(), 1.0);
  }
}

TEST(Gain, LmiStabilizesTwoStateFamily) {
  std::vector<VertexPair> family;
  for (double k1 : {0.8, 1.2}) {
    MatrixXd a(2, 2);
    a << 1.1, 0.3 * k1, 0.0, 0.95;
    MatrixXd b(2, 1);
    b << 0.0, k1;
    family.push_back({a, b});
  }
  const auto k = quadratic_stability_gain(family);
  ASSERT_TRUE(k.has_value());
  for (const auto& v : family) EXPECT_LT(setcalc::spectral_radius(v.a + v.b * *k), 1.0);
}

TEST(Gain, UavCertificatesAtAllVertices) {
  for (const auto* s : {&longitudinal_setup(), &lateral_setup()}) {
    ASSERT_EQ(s->syn->vertex_radii.size(), 9u);  // nominal + 8 corners
    for (double r : s->syn->vertex_radii) EXPECT_LT(r, 1.0);
    // Independent recomputation of the certificate.
    for (const auto& v : s->vertices) {
      const Eigen::VectorXcd eig = Eigen::EigenSolver<MatrixXd>(v.A + v.B * s->syn->K).eigenvalues();
      EXPECT_LT(eig.cwiseAbs().maxCoeff(), 1.0);
    }
  }
}

// Minimizes ½xᵀHx + fᵀx over Cx ≤ d by trying every active set.
VectorXd qp_by_enumeration(const MatrixXd& h, const VectorXd& f, const MatrixXd& c,
                           const VectorXd& d, double* best_value) {
  const int n = h.rows();
  const int m = c.rows();
  double best = std::numeric_limits<double>::infinity();
  VectorXd arg;
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i) {
      if (mask & (1 << i)) act.push_back(i);
    }
    if (static_cast<int>(act.size()) > n) continue;
    const int k = act.size();
    MatrixXd kkt = MatrixXd::Zero(n + k, n + k);
    VectorXd rhs(n + k);
    kkt.topLeftCorner(n, n) = h;
    rhs.head(n) = -f;
    for (int j = 0; j < k; ++j) {
      kkt.block(0, n + j, n, 1) = c.row(act[j]).transpose();
      kkt.block(n + j, 0, 1, n) = c.row(act[j]);
      rhs(n + j) = d(act[j]);
    }
    Eigen::FullPivLU<MatrixXd> lu(kkt);
    if (lu.rank() < n + k) continue;
    const VectorXd sol = lu.solve(rhs);
    const VectorXd x = sol.head(n);
    if (((c * x - d).array() > 1e-9).any()) continue;
    const double val = 0.5 * x.dot(h * x) + f.dot(x);
    if (val < best) {
      best = val;
      arg = x;
    }
  }
  *best_value = best;
  return arg;
}

TEST(Qp, MatchesActiveSetEnumeration) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3;
    const int m = 7;
    MatrixXd l = MatrixXd::NullaryExpr(n, n, [&] { return g(rng); });
    const MatrixXd h = l * l.transpose() + 0.1 * MatrixXd::Identity(n, n);
    const VectorXd f = VectorXd::NullaryExpr(n, [&] { return 3.0 * g(rng); });
    const MatrixXd c = MatrixXd::NullaryExpr(m, n, [&] { return g(rng); });
    const VectorXd d = VectorXd::NullaryExpr(m, [&] { return std::abs(g(rng)) + 0.1; });
    const DenseQp qp(h, c);
    const auto sol = qp.solve(f, d);
    ASSERT_EQ(sol.status, QpStatus::kOptimal);
    double oracle_value = 0.0;
    const VectorXd oracle = qp_by_enumeration(h, f, c, d, &oracle_value);
    EXPECT_NEAR(sol.objective, oracle_value, 1e-8 * (1.0 + std::abs(oracle_value)));
    EXPECT_LT((sol.x - oracle).norm(), 1e-6 * (1.0 + oracle.norm()));
    EXPECT_LT(kkt_residual(h, f, c, d, sol.x, sol.lambda).max(), 1e-9);
    ++compared;
  }
  EXPECT_EQ(compared, 200);
}

TEST(Qp, DetectsInfeasibility) {
  MatrixXd c(2, 1);
  c << 1, -1;
  const DenseQp qp(scalar(1), c);
  const auto sol = qp.solve(vec1(0), VectorXd::Constant(2, -1.0));
  EXPECT_EQ(sol.status, QpStatus::kInfeasible);
  EXPECT_GE(sol.blocking_row, 0);
}

// Hand-built synthesis for the scalar instance A = 1, B = 0.1 with loose sets.
std::shared_ptr<TubeSynthesis> scalar_synthesis(int horizon) {
  auto syn = std::make_shared<TubeSynthesis>();
  syn->model_d = scalar_model(1.0, 0.1);
  syn->weights.Q = scalar(1);
  syn->weights.R = scalar(1);
  syn->weights.N = horizon;
  syn->P = solve_dare(scalar(1), scalar(0.1), scalar(1), scalar(1));
  syn->K = lqr_gain(scalar(1), scalar(0.1), scalar(1), syn->P);
  syn->X = Polytope::box(vec1(100));
  syn->U = Polytope::box(vec1(100));
  syn->W = Polytope::origin(1);
  syn->S = Polytope::origin(1);
  syn->Z = syn->X;
  syn->V = syn->U;
  syn->Zf = terminal_set(syn->closed_loop(), syn->Z, syn->V, syn->K).set;
  return syn;
}

TEST(Qp, ScalarHorizonTwoMatchesGridSearch) {
  auto syn = scalar_synthesis(2);
  const double p = syn->P(0, 0);
  TubeMpc mpc(syn);
  const double x0 = 1.0;
  const auto out = mpc.step(vec1(x0), Setpoint{{0}, vec1(0.0)});
  ASSERT_TRUE(out.feasible);
  const VectorXd v = mpc.last_solution().x;

  // 2001 x 2001 lattice over [−2, 2]².
  const int points = 2001;
  const double lo = -2.0;
  const double step = 4.0 / (points - 1);
  double best = std::numeric_limits<double>::infinity();
  double b0 = 0.0, b1 = 0.0;
  for (int i = 0; i < points; ++i) {
    const double v0 = lo + i * step;
    const double z1 = x0 + 0.1 * v0;
    for (int j = 0; j < points; ++j) {
      const double v1 = lo + j * step;
      const double z2 = z1 + 0.1 * v1;
      const double cost = x0 * x0 + v0 * v0 + z1 * z1 + v1 * v1 + p * z2 * z2;
      if (cost < best) {
        best = cost;
        b0 = v0;
        b1 = v1;
      }
    }
  }
  EXPECT_LE(std::abs(v(0) - b0), step);
  EXPECT_LE(std::abs(v(1) - b1), step);
  EXPECT_LE(out.cost, best + 1e-12);
  EXPECT_NEAR(out.cost, mpc.horizon_cost(vec1(x0), v), 1e-12);
}

TEST(Qp, KktResidualOnMissionWeightsInstance) {
  const auto& s = longitudinal_setup();
  TubeMpc mpc(s.syn);
  const Setpoint sp{{0, 4}, Eigen::Vector2d(0.0, 5.0)};
  const auto prob = mpc.build_problem(VectorXd::Zero(5), sp);
  const auto sol = mpc.qp().solve(prob.f, prob.d);
  ASSERT_EQ(sol.status, QpStatus::kOptimal);
  EXPECT_FALSE(sol.active.empty());
  const auto kkt = kkt_residual(mpc.qp().hessian(), prob.f, mpc.qp().constraints(), prob.d, sol.x,
                                sol.lambda);
  EXPECT_LT(kkt.max(), 1e-8);
}

TEST(Tighten, ZeroTubeLeavesSetsUnchanged) {
  const Polytope x = Polytope::box(Eigen::Vector2d(1, 2));
  const Polytope u = Polytope::box(vec1(0.5));
  MatrixXd k(1, 2);
  k << 0.3, -0.7;
  const auto [z, v] = tighten(x, u, Polytope::origin(2), k);
  EXPECT_LT((z.offsets() - x.offsets()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((v.offsets() - u.offsets()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Tighten, BoxShrinkWithZeroGain) {
  const auto [z, v] = tighten(Polytope::box(Eigen::Vector2d(1, 1)), Polytope::box(vec1(0.5)),
                              Polytope::box(Eigen::Vector2d(0.2, 0.2)), MatrixXd::Zero(1, 2));
  ASSERT_TRUE(z.is_box());
  EXPECT_NEAR(z.axis_bounds()->upper(0), 0.8, 1e-15);
  EXPECT_NEAR(z.axis_bounds()->lower(1), -0.8, 1e-15);
  EXPECT_NEAR(v.offsets().maxCoeff(), 0.5, 1e-15);
}

TEST(Tighten, AileronMarginEqualsSupportOfKS) {
  const auto& s = lateral_setup();
  const auto& syn = *s.syn;
  // Independent support of K·S: max over the vertices of S.
  // S here is a template polytope; compare against the support LP along Kᵀ
  // and against the box oracle of its enclosing axis bounds.
  const VectorXd kt = syn.K.transpose().col(0);
  const double margin = syn.U.offsets().maxCoeff() - syn.V.offsets().maxCoeff();
  EXPECT_GT(margin, 0.0);
  EXPECT_NEAR(margin, syn.S.support(kt), 1e-12);
  double box_bound = 0.0;
  for (int j = 0; j < 4; ++j) {
    box_bound += std::abs(kt(j)) * std::max(syn.S.support(VectorXd::Unit(4, j)),
                                            syn.S.support(-VectorXd::Unit(4, j)));
  }
  EXPECT_LE(margin, box_bound + 1e-12);
  for (int i = 0; i < syn.V.rows(); ++i) EXPECT_LT(syn.V.offsets()(i), 25 * kDeg);
}

TEST(Tighten, ReportsWhichSetVanished) {
  try {
    tighten(Polytope::box(vec1(1)), Polytope::box(vec1(1)), Polytope::box(vec1(2)), scalar(0));
    FAIL();
  } catch (const setcalc::EmptyTightenedSet& e) {
    EXPECT_NE(std::string(e.what()).find("Z"), std::string::npos);
  }
  try {
    tighten(Polytope::box(vec1(5)), Polytope::box(vec1(1)), Polytope::box(vec1(2)), scalar(1));
    FAIL();
  } catch (const setcalc::EmptyTightenedSet& e) {
    EXPECT_NE(std::string(e.what()).find("V"), std::string::npos);
  }
}

TEST(TerminalSet, NilpotentClosedLoopIsOneStep) {
  const Polytope z = Polytope::box(Eigen::Vector2d(1, 1));
  const Polytope v = Polytope::box(vec1(0.5));
  MatrixXd k(1, 2);
  k << 1.0, 0.0;
  const auto zf = terminal_set(MatrixXd::Zero(2, 2), z, v, k);
  EXPECT_EQ(zf.iterations, 1);
  // {z ∈ Z : |z₁| ≤ 0.5}
  EXPECT_NEAR(zf.set.support(Eigen::Vector2d(1, 0)), 0.5, 1e-12);
  EXPECT_NEAR(zf.set.support(Eigen::Vector2d(0, 1)), 1.0, 1e-12);
}

TEST(TerminalSet, ContractionKeepsBox) {
  const Polytope z = Polytope::box(Eigen::Vector2d(1, 1));
  const auto zf = terminal_set(0.5 * MatrixXd::Identity(2, 2), z, Polytope::box(vec1(1)),
                               MatrixXd::Zero(1, 2));
  // Vertex propagation: every vertex of Z maps inside Z, so Z is invariant.
  for (const auto& vtx : z.vertices()) EXPECT_TRUE(z.contains(0.5 * vtx));
  EXPECT_LT(setcalc::hausdorff_distance(zf.set, z), 1e-12);
}

TEST(TerminalSet, MonotoneInZ) {
  MatrixXd a(2, 2);
  a << 0.9, 0.4, -0.4, 0.9;
  a *= 0.95;
  MatrixXd k(1, 2);
  k << 0.2, 0.1;
  const auto big = terminal_set(a, Polytope::box(Eigen::Vector2d(1, 1)), Polytope::box(vec1(1)), k);
  const auto small =
      terminal_set(a, Polytope::box(Eigen::Vector2d(0.6, 0.6)), Polytope::box(vec1(1)), k);
  EXPECT_TRUE(setcalc::is_subset(small.set, big.set));
  // Invariance of the result at its vertices.
  for (const auto& vtx : big.set.vertices()) EXPECT_TRUE(big.set.contains(a * vtx, 1e-9));
}

TEST(TerminalSet, CapRaisesNonConvergent) {
  MatrixXd a(2, 2);
  a << 0.99, 0.1, -0.1, 0.99;
  EXPECT_THROW(terminal_set(a, Polytope::box(Eigen::Vector2d(1, 0.1)), Polytope::box(vec1(1)),
                            MatrixXd::Zero(1, 2), 2),
               setcalc::NonConvergent);
}

TEST(Synthesis, SetInclusionsHold) {
  for (const auto* s : {&longitudinal_setup(), &lateral_setup()}) {
    const auto& syn = *s->syn;
    EXPECT_TRUE(setcalc::is_subset(syn.Z, syn.X));
    EXPECT_TRUE(setcalc::is_subset(syn.V, syn.U));
    EXPECT_TRUE(setcalc::is_subset(syn.Zf, syn.Z));
    const MatrixXd a_k = syn.closed_loop();
    // Zf invariant: h_Zf(A_Kᵀ c) ≤ h_Zf(c) on every row of Zf.
    for (int i = 0; i < syn.Zf.rows(); ++i) {
      const VectorXd c = syn.Zf.normals().row(i).transpose();
      EXPECT_LE(syn.Zf.support(a_k.transpose() * c), syn.Zf.offsets()(i) + 1e-9);
    }
    // K·Zf ⊆ V.
    for (int i = 0; i < syn.V.rows(); ++i) {
      const VectorXd g = syn.V.normals().row(i).transpose();
      EXPECT_LE(syn.Zf.support(syn.K.transpose() * g), syn.V.offsets()(i) + 1e-9);
    }
  }
}

TEST(Synthesis, EmptyTighteningAborts) {
  const auto& s = lateral_setup();
  EXPECT_THROW(synthesize_tube(s.vertices, Polytope::box(s.limits.state_half_widths),
                               Polytope::box(s.limits.input_half_widths),
                               Polytope::box(200.0 * s.w_step), s.weights),
               setcalc::EmptyTightenedSet);
}

TEST(SteadyState, LateralRollSetpointIsEquilibrium) {
  const auto& s = lateral_setup();
  const auto eq = steady_state(s.model_d, Setpoint{{3}, vec1(20 * kDeg)});
  EXPECT_NEAR(eq.x(3), 20 * kDeg, 1e-15);
  EXPECT_LT((s.model_d.A * eq.x + s.model_d.B * eq.v - eq.x).norm(), 1e-10);
}

TEST(SteadyState, RejectsUnreachableSetpoint) {
  // x⁺ = 0.5x + 0·u has only x = 0 as an equilibrium.
  EXPECT_THROW(steady_state(scalar_model(0.5, 0.0), Setpoint{{0}, vec1(1.0)}), SynthesisError);
}

TEST(MpcStep, EquilibriumGivesZeroInput) {
  const auto& s = longitudinal_setup();
  TubeMpc mpc(s.syn);
  const auto out = mpc.step(VectorXd::Zero(5), Setpoint{{0, 4}, Eigen::Vector2d(0, 0)});
  ASSERT_TRUE(out.feasible);
  EXPECT_LT(out.v.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(out.u.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MpcStep, AltitudeStepRespectsSurfaceLimits) {
  const auto& s = longitudinal_setup();
  TubeMpc mpc(s.syn);
  const Setpoint sp{{0, 4}, Eigen::Vector2d(0, 5)};
  const auto out = mpc.step(VectorXd::Zero(5), sp);
  ASSERT_TRUE(out.feasible);
  EXPECT_LE(std::abs(out.u(1)), 25 * kDeg);
  EXPECT_TRUE(s.syn->V.contains(out.v, 1e-9));
  EXPECT_GT(std::abs(out.v(1)), 1e-3);
}

TEST(MpcStep, InfeasibleProblemIsReportedOrFallsBack) {
  const auto& s = lateral_setup();
  TubeMpc strict(s.syn);
  VectorXd far = VectorXd::Zero(4);
  far(3) = 44 * kDeg;
  far(1) = 100 * kDeg;
  EXPECT_THROW(strict.step(far, Setpoint{{3}, vec1(0.0)}, true), InfeasibleError);

  TubeMpc lenient(s.syn);
  const auto out = lenient.step(far, Setpoint{{3}, vec1(0.0)});
  EXPECT_FALSE(out.feasible);
  EXPECT_FALSE(out.infeasible_family.empty());
  EXPECT_TRUE(out.u.allFinite());
}

TEST(MpcStep, LiteralModeResetsNominalState) {
  const auto& s = lateral_setup();
  TubeMpc mpc(s.syn, TubeMode::kLiteral);
  VectorXd x = VectorXd::Zero(4);
  const Setpoint sp{{3}, vec1(10 * kDeg)};
  for (int k = 0; k < 5; ++k) {
    const auto out = mpc.step(x, sp);
    EXPECT_EQ(out.z, x);
    EXPECT_LT((out.u - out.v).norm(), 1e-15);
    x = s.model_d.A * x + s.model_d.B * out.u + VectorXd::Constant(4, 1e-4);
  }
}

// Runs one closed loop on the nominal discrete plant with disturbances
// drawn from W and reports whether the tube and feasibility held.
struct LoopStats {
  int containment_violations = 0;
  int infeasible = 0;
  int input_violations = 0;
};

LoopStats run_tube(const tubeuav::testing::AxisSetup& s, TubeMode mode, const Setpoint& sp,
                   const VectorXd& x0, int steps, std::uint64_t seed, bool extreme) {
  TubeMpc mpc(s.syn, mode);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const int n = s.model_d.num_states();
  VectorXd x = x0;
  LoopStats stats;
  for (int k = 0; k < steps; ++k) {
    const auto out = mpc.step(x, sp);
    if (!out.feasible) ++stats.infeasible;
    if (!s.syn->U.contains(out.u, 1e-9)) ++stats.input_violations;
    VectorXd w(n);
    for (int i = 0; i < n; ++i) {
      w(i) = s.w_step(i) * (extreme ? (coin(rng) ? 1.0 : -1.0) : unit(rng));
    }
    x = s.model_d.A * x + s.model_d.B * out.u + w;
    if (!s.syn->S.contains(x - mpc.state().z, 1e-9)) ++stats.containment_violations;
  }
  return stats;
}

TEST(TubeProperties, ContainmentFeasibilityAndLimitsBothModes) {
  const auto& lon = longitudinal_setup();
  const auto& lat = lateral_setup();
  VectorXd x0_lon = VectorXd::Zero(5);
  x0_lon << 1.0, 0, 0, 0, -4.0;
  VectorXd x0_lat = VectorXd::Zero(4);
  x0_lat(3) = 10 * kDeg;
  for (TubeMode mode : {TubeMode::kConventional, TubeMode::kLiteral}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const bool extreme = seed % 2 == 1;
      const auto a = run_tube(lon, mode, Setpoint{{0, 4}, Eigen::Vector2d(0, 0)}, x0_lon, 200,
                              seed, extreme);
      const auto b = run_tube(lat, mode, Setpoint{{3}, vec1(-15 * kDeg)}, x0_lat, 200, seed, extreme);
      EXPECT_EQ(a.containment_violations, 0) << to_string(mode);
      EXPECT_EQ(b.containment_violations, 0) << to_string(mode);
      EXPECT_EQ(a.input_violations + b.input_violations, 0) << to_string(mode);
      if (mode == TubeMode::kConventional) {
        EXPECT_EQ(a.infeasible + b.infeasible, 0);
      }
    }
  }
}

TEST(TubeProperties, NominalConvergenceAndCostDecrease) {
  for (const auto* s : {&longitudinal_setup(), &lateral_setup()}) {
    const int n = s->model_d.num_states();
    TubeMpc mpc(s->syn);
    const Setpoint sp = n == 5 ? Setpoint{{0, 4}, Eigen::Vector2d(0.5, 3.0)}
                               : Setpoint{{3}, vec1(12 * kDeg)};
    const auto eq = steady_state(s->model_d, sp);
    VectorXd x = VectorXd::Zero(n);
    double previous = -1.0;
    double previous_stage = 0.0;
    for (int k = 0; k < 400; ++k) {
      const auto out = mpc.step(x, sp);
      ASSERT_TRUE(out.feasible);
      if (previous >= 0.0) {
        EXPECT_LE(out.cost, previous - previous_stage + 1e-6 * (1.0 + previous)) << "step " << k;
      }
      const VectorXd dz = out.z - eq.x;
      const VectorXd dv = out.v - eq.v;
      previous = out.cost;
      previous_stage = dz.dot(s->weights.Q * dz) + dv.dot(s->weights.R * dv);
      x = s->model_d.A * x + s->model_d.B * out.u;
    }
    EXPECT_LT((x - eq.x).cwiseAbs().maxCoeff(), 1e-3);
  }
}

}  // namespace
}  // namespace tubeuav::trmpc
