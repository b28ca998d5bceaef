#pragma once

#include <vector>

#include <Eigen/Dense>

namespace tubeuav::trmpc {

enum class QpStatus { kOptimal, kInfeasible, kIterationLimit };

struct QpSolution {
  QpStatus status = QpStatus::kInfeasible;
  Eigen::VectorXd x;
  /// Multipliers for the rows of C (λ ≥ 0).
  Eigen::VectorXd lambda;
  double objective = 0.0;
  int iterations = 0;
  std::vector<int> active;
  /// Row that could not be satisfied when status is kInfeasible.
  int blocking_row = -1;
};

struct KktResidual {
  double stationarity = 0.0;  // ‖Hx + f + Cᵀλ‖∞ / (1 + ‖f‖∞ + ‖H‖∞‖x‖∞)
  double primal = 0.0;        // max(0, Cx − d) on unit-norm rows
  double dual = 0.0;          // max(0, −λ)
  double complementarity = 0.0;

  double max() const;
};

/**
 * Strictly convex dense QP: min ½xᵀHx + fᵀx  s.t.  Cx ≤ d.
 *
 * Goldfarb–Idnani dual active-set method. H and C are fixed at construction
 * (the Cholesky factor is computed once); f and d vary per solve.
 */
class DenseQp {
 public:
  DenseQp() = default;
  DenseQp(Eigen::MatrixXd h, Eigen::MatrixXd c);

  QpSolution solve(const Eigen::VectorXd& f, const Eigen::VectorXd& d) const;

  int num_variables() const { return static_cast<int>(h_.rows()); }
  int num_constraints() const { return static_cast<int>(c_.rows()); }
  const Eigen::MatrixXd& hessian() const { return h_; }
  const Eigen::MatrixXd& constraints() const { return c_; }

 private:
  Eigen::MatrixXd h_;
  Eigen::MatrixXd c_;
  Eigen::MatrixXd c_unit_;
  Eigen::VectorXd row_norm_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd j0_;  // L⁻ᵀ
};

KktResidual kkt_residual(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                         const Eigen::MatrixXd& c, const Eigen::VectorXd& d,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& lambda);

}  // namespace tubeuav::trmpc
