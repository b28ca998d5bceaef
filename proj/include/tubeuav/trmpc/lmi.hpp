#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace tubeuav::trmpc {

/// Symmetric matrix function F(x) = F₀ + Σⱼ xⱼ Fⱼ.
struct AffineMatrix {
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> coefficients;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;
};

struct LmiOptions {
  int max_newton_steps = 400;
  /// Stop as soon as the margin exceeds this value.
  double target_margin = 1e-6;
};

struct LmiResult {
  Eigen::VectorXd x;
  /// max s with Fᵢ(x) ⪰ s·I for every block (the strictly-feasible margin).
  double margin = 0.0;
  bool feasible = false;
};

/**
 * Finds x with Fᵢ(x) ≻ 0 for every block, treating the last block list
 * entries as-is. Solved as max s s.t. Fᵢ(x) − sI ⪰ 0 with a log-det barrier
 * path-following method. `bounds` are blocks that must stay positive but do
 * not take part in the margin (normalization constraints).
 */
LmiResult solve_lmi_feasibility(const std::vector<AffineMatrix>& blocks,
                                const std::vector<AffineMatrix>& bounds,
                                const Eigen::VectorXd& x0, const LmiOptions& options = {});

/// Quadratic-stability state feedback over a vertex family:
/// find Y ≻ 0, L with [Y, (AᵢY + BᵢL)ᵀ; AᵢY + BᵢL, Y] ≻ 0 and K = L Y⁻¹.
struct VertexPair {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
};
std::optional<Eigen::MatrixXd> quadratic_stability_gain(const std::vector<VertexPair>& vertices,
                                                        const LmiOptions& options = {});

}  // namespace tubeuav::trmpc
