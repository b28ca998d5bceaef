#include "tubeuav/trmpc/synthesis.hpp"

#include <cmath>

#include "tubeuav/setcalc/lp.hpp"
#include "tubeuav/setcalc/mrpi.hpp"
#include "tubeuav/trmpc/dare.hpp"

namespace tubeuav::trmpc {

using setcalc::Polytope;

void TubeWeights::validate(int states, int inputs) const {
  if (Q.rows() != states || Q.cols() != states) throw SynthesisError("weights: Q has wrong size");
  if (R.rows() != inputs || R.cols() != inputs) throw SynthesisError("weights: R has wrong size");
  if (N < 1) throw SynthesisError("weights: horizon must be at least 1");
  const Eigen::MatrixXd qs = 0.5 * (Q + Q.transpose());
  if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(qs).eigenvalues().minCoeff() < 0.0) {
    throw SynthesisError("weights: Q must be positive semidefinite");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(0.5 * (R + R.transpose())).info() != Eigen::Success) {
    throw SynthesisError("weights: R must be positive definite");
  }
}

TubeWeights TubeWeights::longitudinal_defaults() {
  TubeWeights w;
  w.Q = Eigen::Vector<double, 5>(1e6, 4e1, 4e1, 4e1, 1e5).asDiagonal();
  w.R = Eigen::Vector2d(4e2, 3e-6).asDiagonal();
  w.N = 15;
  return w;
}

TubeWeights TubeWeights::lateral_defaults() {
  TubeWeights w;
  w.Q = Eigen::Vector4d(1e1, 1e1, 1e1, 1e4).asDiagonal();
  w.R = Eigen::MatrixXd::Constant(1, 1, 1e6);
  w.N = 15;
  return w;
}

namespace {
constexpr double kDeg = M_PI / 180.0;
}  // namespace

// u, alpha, theta, q, h / throttle, elevator.
AxisLimits AxisLimits::longitudinal_defaults() {
  AxisLimits l;
  l.state_half_widths = Eigen::Vector<double, 5>(5.0, 10 * kDeg, 20 * kDeg, 60 * kDeg, 20.0);
  l.input_half_widths = Eigen::Vector2d(0.5, 25 * kDeg);
  return l;
}

// v, p, r, phi / aileron.
AxisLimits AxisLimits::lateral_defaults() {
  AxisLimits l;
  l.state_half_widths = Eigen::Vector4d(5.0, 120 * kDeg, 60 * kDeg, 45 * kDeg);
  l.input_half_widths = Eigen::VectorXd::Constant(1, 25 * kDeg);
  return l;
}

std::pair<Polytope, Polytope> tighten(const Polytope& x, const Polytope& u, const Polytope& s,
                                      const Eigen::MatrixXd& k) {
  Polytope z;
  try {
    z = setcalc::pontryagin_diff(x, s);
  } catch (const setcalc::EmptyTightenedSet&) {
    throw setcalc::EmptyTightenedSet("tighten: Z = X ⊖ S is empty");
  }
  // V = U ⊖ KS row by row: h_KS(c) = h_S(Kᵀc).
  Eigen::VectorXd offsets = u.offsets();
  for (int i = 0; i < u.rows(); ++i) {
    offsets(i) -= s.support(k.transpose() * u.normals().row(i).transpose());
  }
  Polytope v(u.normals(), offsets);
  if (v.is_empty()) throw setcalc::EmptyTightenedSet("tighten: V = U ⊖ KS is empty");
  return {z, v};
}

TerminalSet terminal_set(const Eigen::MatrixXd& a_k, const Polytope& z, const Polytope& v,
                         const Eigen::MatrixXd& k, int max_iterations) {
  const int n = z.dim();
  if (a_k.rows() != n || a_k.cols() != n || k.cols() != n || k.rows() != v.dim()) {
    throw SynthesisError("terminal_set: dimension mismatch");
  }
  if (!(setcalc::spectral_radius(a_k) < 1.0)) {
    throw SynthesisError("terminal_set: closed loop is not Schur stable");
  }

  // Admissible set as G z ≤ g; rows of V·K that vanish impose nothing.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> offs;
  for (int i = 0; i < z.rows(); ++i) {
    rows.push_back(z.normals().row(i).transpose());
    offs.push_back(z.offsets()(i));
  }
  for (int i = 0; i < v.rows(); ++i) {
    const Eigen::VectorXd r = k.transpose() * v.normals().row(i).transpose();
    if (r.norm() < 1e-14) {
      if (v.offsets()(i) < 0.0) throw setcalc::EmptyTightenedSet("terminal_set: V excludes 0");
      continue;
    }
    rows.push_back(r);
    offs.push_back(v.offsets()(i));
  }
  const int base = static_cast<int>(rows.size());
  Eigen::MatrixXd g(base, n);
  Eigen::VectorXd h(base);
  for (int i = 0; i < base; ++i) {
    g.row(i) = rows[i].transpose();
    h(i) = offs[i];
  }

  Polytope current = Polytope(g, h).without_redundant_rows();
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (int it = 1; it <= max_iterations; ++it) {
    power = a_k * power;
    std::vector<int> binding;
    Eigen::MatrixXd candidates = g * power;
    for (int i = 0; i < base; ++i) {
      const double norm = candidates.row(i).norm();
      if (norm < 1e-14) continue;
      const double hmax = current.support(candidates.row(i).transpose());
      if (hmax > h(i) + 1e-9 * (1.0 + std::abs(h(i)))) binding.push_back(i);
    }
    if (binding.empty()) return {current, it};
    Eigen::MatrixXd a(current.rows() + binding.size(), n);
    Eigen::VectorXd b(current.rows() + binding.size());
    a.topRows(current.rows()) = current.normals();
    b.head(current.rows()) = current.offsets();
    for (std::size_t j = 0; j < binding.size(); ++j) {
      const int i = binding[j];
      const double norm = candidates.row(i).norm();
      a.row(current.rows() + j) = candidates.row(i) / norm;
      b(current.rows() + j) = h(i) / norm;
    }
    current = Polytope(a, b).without_redundant_rows();
  }
  throw setcalc::NonConvergent("terminal_set: not finitely determined within " +
                               std::to_string(max_iterations) + " iterations");
}

Eigen::VectorXd accumulated_disturbance_box(const Eigen::MatrixXd& a_fine,
                                            const Eigen::VectorXd& w_half, int ticks) {
  const int n = static_cast<int>(a_fine.rows());
  Eigen::VectorXd total = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < ticks; ++j) {
    total += power.cwiseAbs() * w_half;
    power = a_fine * power;
  }
  return total;
}

TubeSynthesis synthesize_tube(const std::vector<airframe::LinearModel>& vertices,
                              const Polytope& x, const Polytope& u, const Polytope& w,
                              const TubeWeights& weights, const SynthesisOptions& options) {
  if (vertices.empty()) throw SynthesisError("synthesize_tube: no models");
  const auto& nominal = vertices.front();
  const int n = nominal.num_states();
  const int m = nominal.num_inputs();
  weights.validate(n, m);
  if (x.dim() != n || w.dim() != n || u.dim() != m) {
    throw SynthesisError("synthesize_tube: set dimensions do not match the model");
  }
  for (const auto& [set, name] : {std::pair{&x, "X"}, {&u, "U"}, {&w, "W"}}) {
    if (!set->contains(Eigen::VectorXd::Zero(set->dim()), 0.0)) {
      throw SynthesisError(std::string("synthesize_tube: ") + name + " must contain the origin");
    }
  }

  TubeSynthesis syn;
  syn.model_d = nominal;
  syn.weights = weights;
  const GainCertificate cert = synthesize_gain(vertices, weights.Q, weights.R);
  syn.K = cert.K;
  syn.P = cert.P;
  syn.gain_method = cert.method;
  syn.vertex_radii = cert.vertex_radii;
  syn.X = x;
  syn.U = u;
  syn.W = w;

  // Tightening only ever queries S along the rows of X and Kᵀ·(rows of U);
  // keeping them in the template makes the tightening exact for S.
  setcalc::MrpiOptions mrpi_opts;
  mrpi_opts.max_terms = options.mrpi_max_terms;
  for (int i = 0; i < x.rows(); ++i) mrpi_opts.extra_directions.push_back(x.normals().row(i).transpose());
  for (int i = 0; i < u.rows(); ++i) {
    const Eigen::VectorXd d = syn.K.transpose() * u.normals().row(i).transpose();
    if (d.norm() > 0.0) mrpi_opts.extra_directions.push_back(d);
  }
  const Eigen::MatrixXd a_k = syn.closed_loop();
  const auto mrpi = setcalc::mrpi_approx(a_k, w, options.mrpi_eps, mrpi_opts);
  syn.S = mrpi.set;
  syn.mrpi_terms = mrpi.terms;
  syn.mrpi_alpha = mrpi.alpha;
  syn.mrpi_exact = mrpi.exact;

  std::tie(syn.Z, syn.V) = tighten(x, u, syn.S, syn.K);
  const TerminalSet zf = terminal_set(a_k, syn.Z, syn.V, syn.K, options.terminal_max_iterations);
  syn.Zf = zf.set;
  syn.terminal_iterations = zf.iterations;
  return syn;
}

}  // namespace tubeuav::trmpc
