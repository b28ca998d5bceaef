#include "tubeuav/trmpc/gain.hpp"

#include <algorithm>

#include "tubeuav/setcalc/mrpi.hpp"
#include "tubeuav/trmpc/lmi.hpp"

namespace tubeuav::trmpc {

std::string to_string(GainMethod method) {
  return method == GainMethod::kLqr ? "lqr" : "quadratic-stability-lmi";
}

double GainCertificate::worst_radius() const {
  return vertex_radii.empty() ? 0.0 : *std::max_element(vertex_radii.begin(), vertex_radii.end());
}

std::vector<double> vertex_spectral_radii(const std::vector<airframe::LinearModel>& vertices,
                                          const Eigen::MatrixXd& k) {
  std::vector<double> radii;
  radii.reserve(vertices.size());
  for (const auto& v : vertices) radii.push_back(setcalc::spectral_radius(v.A + v.B * k));
  return radii;
}

GainCertificate synthesize_gain(const std::vector<airframe::LinearModel>& vertices,
                                const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
  if (vertices.empty()) throw SynthesisError("synthesize_gain: empty vertex list");
  for (const auto& v : vertices) {
    if (!v.is_discrete()) throw SynthesisError("synthesize_gain: vertex models must be discrete");
  }
  const auto& nominal = vertices.front();

  GainCertificate cert;
  cert.P = solve_dare(nominal.A, nominal.B, q, r);
  cert.K = lqr_gain(nominal.A, nominal.B, r, cert.P);
  cert.method = GainMethod::kLqr;
  cert.vertex_radii = vertex_spectral_radii(vertices, cert.K);
  const double lqr_worst = cert.worst_radius();
  if (lqr_worst < 1.0) return cert;

  std::vector<VertexPair> pairs;
  for (const auto& v : vertices) pairs.push_back({v.A, v.B});
  const auto k = quadratic_stability_gain(pairs);
  if (!k) {
    throw GainSynthesisError(
        "synthesize_gain: no robustly stabilizing gain found (LQR worst vertex spectral radius " +
            std::to_string(lqr_worst) + ", LMI infeasible)",
        lqr_worst);
  }
  cert.K = *k;
  cert.method = GainMethod::kQuadraticStability;
  cert.vertex_radii = vertex_spectral_radii(vertices, cert.K);
  if (!(cert.worst_radius() < 1.0)) {
    throw GainSynthesisError("synthesize_gain: LMI gain fails the vertex check (worst radius " +
                                 std::to_string(cert.worst_radius()) + ")",
                             cert.worst_radius());
  }
  const Eigen::MatrixXd a_k = nominal.A + nominal.B * cert.K;
  cert.P = solve_discrete_lyapunov(a_k, q + cert.K.transpose() * r * cert.K);
  return cert;
}

}  // namespace tubeuav::trmpc
