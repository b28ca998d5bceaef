#pragma once

#include <Eigen/Dense>

namespace tubeuav::setcalc {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  /// Primal solution of the standard-form problem.
  Eigen::VectorXd y;
  /// Multipliers of the equality constraints (c - Eᵀπ ≥ 0 at optimality).
  Eigen::VectorXd multipliers;
};

/// Dense two-phase simplex for  min cᵀy  s.t.  E y = f,  y ≥ 0.
///
/// Bland's rule is used throughout, so the method terminates on degenerate
/// problems. Intended for the small, low-row-count programs that arise from
/// support-function evaluation (rows = ambient dimension).
LpResult solve_standard_form(const Eigen::VectorXd& c, const Eigen::MatrixXd& E,
                             const Eigen::VectorXd& f);

/// Result of maximizing dᵀx over { x : A x ≤ b }.
struct HalfspaceLpResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  Eigen::VectorXd argmax;
};

/// Maximizes dᵀx over the halfspace intersection by solving the dual
///   min bᵀy  s.t.  Aᵀy = d, y ≥ 0.
/// A dual that is infeasible means the primal is unbounded or empty; the two
/// cases are told apart with a Chebyshev-ball feasibility program.
HalfspaceLpResult maximize_over_halfspaces(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& d);

/// Largest r such that a ball of radius r fits in { x : A x ≤ b } (rows of A
/// must be unit norm), capped at `radius_cap`. A negative value means the set
/// is empty; zero means it is flat.
struct ChebyshevBall {
  Eigen::VectorXd center;
  double radius = 0.0;
};
ChebyshevBall chebyshev_ball(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             double radius_cap = 1.0);

}  // namespace tubeuav::setcalc
