#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tubeuav/airframe/models.hpp"
#include "tubeuav/trmpc/dare.hpp"

namespace tubeuav::trmpc {

enum class GainMethod { kLqr, kQuadraticStability };
std::string to_string(GainMethod method);

struct GainCertificate {
  Eigen::MatrixXd K;
  /// Terminal cost: the DARE solution for kLqr, otherwise the Lyapunov
  /// solution of P = A_KᵀPA_K + Q + KᵀRK at the nominal vertex.
  Eigen::MatrixXd P;
  GainMethod method = GainMethod::kLqr;
  /// Spectral radius of Aᵢ + BᵢK, one per vertex in input order.
  std::vector<double> vertex_radii;

  double worst_radius() const;
};

class GainSynthesisError : public SynthesisError {
 public:
  GainSynthesisError(const std::string& what, double worst_radius)
      : SynthesisError(what), worst_radius_(worst_radius) {}
  double worst_radius() const { return worst_radius_; }

 private:
  double worst_radius_;
};

/**
 * Robustly stabilizing gain over discrete vertex models; vertices[0] is the
 * nominal model. The nominal DLQR gain is tried first and kept when every
 * vertex is Schur; otherwise a quadratic-stability LMI gain is computed.
 */
GainCertificate synthesize_gain(const std::vector<airframe::LinearModel>& vertices,
                                const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

std::vector<double> vertex_spectral_radii(const std::vector<airframe::LinearModel>& vertices,
                                          const Eigen::MatrixXd& k);

}  // namespace tubeuav::trmpc
