#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tubeuav/trmpc/qp.hpp"
#include "tubeuav/trmpc/synthesis.hpp"

namespace tubeuav::trmpc {

/// kConventional: z evolves as z⁺ = A z + B v*, reset to x only at start.
/// kLiteral: z is reset to the measured x before every solve.
enum class TubeMode { kConventional, kLiteral };
std::string to_string(TubeMode mode);
TubeMode tube_mode_from_string(const std::string& text);

/// Tracked state components and their setpoints (deviation coordinates).
struct Setpoint {
  std::vector<int> indices;
  Eigen::VectorXd values;
};

struct Equilibrium {
  Eigen::VectorXd x;
  Eigen::VectorXd v;
};

/// Steady state (A − I)x + Bv = 0 matching the setpoint; minimum-norm in the
/// free components. Throws SynthesisError when the setpoint is unreachable.
Equilibrium steady_state(const airframe::LinearModel& model_d, const Setpoint& setpoint);

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::string family)
      : std::runtime_error(what), family_(std::move(family)) {}
  const std::string& family() const { return family_; }

 private:
  std::string family_;
};

struct ControllerState {
  Eigen::VectorXd z;
  Eigen::VectorXd last_v;
  /// Remaining nominal input plan (absolute coordinates), front = next input.
  std::vector<Eigen::VectorXd> plan;
  bool initialized = false;
};

struct MpcOutput {
  Eigen::VectorXd u;       // applied input, v* + K(x − z)
  Eigen::VectorXd v;       // nominal input v*₀
  Eigen::VectorXd z;       // nominal state used for this solve
  Eigen::VectorXd z_next;  // advanced nominal state
  bool feasible = true;
  std::string infeasible_family;
  int qp_iterations = 0;
  double cost = 0.0;
  double solve_seconds = 0.0;
};

class TubeMpc {
 public:
  TubeMpc(std::shared_ptr<const TubeSynthesis> synthesis, TubeMode mode = TubeMode::kConventional);

  /**
   * One controller tick. With `throw_on_infeasible` the QP failure is reported
   * as InfeasibleError; otherwise the shifted previous plan is applied and the
   * event is flagged in the output.
   */
  MpcOutput step(const Eigen::VectorXd& x, const Setpoint& setpoint,
                 bool throw_on_infeasible = false);

  /// Next call to step() starts a new tube at the measured state.
  void reset();

  /// Condensed problem for the current setpoint and nominal start z.
  struct Problem {
    Eigen::VectorXd f;
    Eigen::VectorXd d;
    Equilibrium eq;
    double terminal_scale = 1.0;
  };
  Problem build_problem(const Eigen::VectorXd& z, const Setpoint& setpoint);

  /// Horizon cost of a deviation input sequence (stacked) from deviation z̃₀.
  double horizon_cost(const Eigen::VectorXd& z0_dev, const Eigen::VectorXd& v_dev) const;

  const DenseQp& qp() const { return qp_; }
  const ControllerState& state() const { return state_; }
  const TubeSynthesis& synthesis() const { return *syn_; }
  TubeMode mode() const { return mode_; }
  const QpSolution& last_solution() const { return last_solution_; }

 private:
  std::string family_of_row(int row) const;
  const Equilibrium& equilibrium_for(const Setpoint& setpoint);
  double terminal_scale(const Equilibrium& eq) const;

  std::shared_ptr<const TubeSynthesis> syn_;
  TubeMode mode_;
  int n_, m_, N_;
  Eigen::MatrixXd phi_;    // stacked Aⁱ, i = 1..N
  Eigen::MatrixXd gamma_;  // stacked prediction of z̃ from ṽ
  Eigen::MatrixXd qbar_;   // blkdiag(Q, …, Q, P)
  Eigen::MatrixXd rbar_;
  Eigen::MatrixXd c_;      // constraint rows in ṽ
  Eigen::MatrixXd c_state_;  // how each row depends on z̃₀ (subtracted from d)
  Eigen::VectorXd d_const_;  // offset part independent of refs
  std::vector<int> qp_rows_;
  std::vector<int> constant_rows_;
  int input_rows_ = 0, state_rows_ = 0, terminal_rows_ = 0;
  DenseQp qp_;
  ControllerState state_;
  QpSolution last_solution_;
  std::optional<Setpoint> cached_setpoint_;
  Equilibrium cached_eq_;
  double cached_scale_ = 1.0;
};

}  // namespace tubeuav::trmpc
