#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace tubeuav::trmpc {

class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stabilizing solution of P = Q + AᵀPA − AᵀPB(R + BᵀPB)⁻¹BᵀPA.
///
/// Structured doubling followed by Newton (Hewer) refinement. Throws
/// SynthesisError when the pair is not stabilizable or R is not positive
/// definite.
Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

/// ‖DARE(P)‖_F / max(1, ‖P‖_F).
double dare_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                     const Eigen::MatrixXd& r, const Eigen::MatrixXd& p);

/// LQR gain for the convention u = Kx: K = −(R + BᵀPB)⁻¹BᵀPA.
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& r, const Eigen::MatrixXd& p);

/// Solves X = AᵀXA + Q for Schur-stable A (Kronecker form; n is small here).
Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

}  // namespace tubeuav::trmpc
