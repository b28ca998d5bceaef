#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tubeuav/airframe/models.hpp"
#include "tubeuav/guidance/grid.hpp"
#include "tubeuav/guidance/pid.hpp"
#include "tubeuav/guidance/sequencer.hpp"
#include "tubeuav/trmpc/synthesis.hpp"
#include "tubeuav/trmpc/tube_mpc.hpp"

namespace tubeuav::sim {

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

struct RateSchedule {
  double dt_plant = 0.01;
  double dt_pid = 0.05;
  double dt_mpc = 0.1;

  /// Throws std::invalid_argument unless both rates are integer multiples of
  /// dt_plant and every MPC tick falls on a PID tick.
  void validate() const;
  int pid_ticks() const;
  int mpc_ticks() const;
};

struct DisturbanceSpec {
  /// Per-plant-tick half widths over [u, alpha, theta, q, h] and [v, p, r, phi].
  Eigen::VectorXd bounds_long = (Eigen::VectorXd(5) << 1e-2, 1e-6, 1e-6, 1e-6, 1e-3).finished();
  Eigen::VectorXd bounds_lat = (Eigen::VectorXd(4) << 1e-2, 1e-6, 1e-6, 1e-6).finished();
  std::uint64_t seed = 1;

  void validate() const;
};

/// Everything needed to synthesize and fly the two controllers.
struct MissionSpec {
  airframe::TrimCondition trim;
  airframe::AeroDerivativeTable aero = airframe::AeroDerivativeTable::bundled_mh850();
  airframe::UncertaintySpec uncertainty;
  trmpc::TubeWeights weights_long = trmpc::TubeWeights::longitudinal_defaults();
  trmpc::TubeWeights weights_lat = trmpc::TubeWeights::lateral_defaults();
  trmpc::AxisLimits limits_long = trmpc::AxisLimits::longitudinal_defaults();
  trmpc::AxisLimits limits_lat = trmpc::AxisLimits::lateral_defaults();
  trmpc::SynthesisOptions synthesis;
  DisturbanceSpec disturbance;
  RateSchedule schedule;
  guidance::FieldSpec field;
  guidance::SequencerOptions sequencer;
  guidance::PidGains pid;
  trmpc::TubeMode tube_mode = trmpc::TubeMode::kConventional;
  int hil_delay_ticks = 0;  // controller output delay, in MPC ticks
  double time_cap = 600.0;  // s
};

/// Offline artifacts shared by every run of a mission.
struct Controllers {
  airframe::AirframeModels models;  // continuous, nominal
  std::shared_ptr<const trmpc::TubeSynthesis> lon;
  std::shared_ptr<const trmpc::TubeSynthesis> lat;
  guidance::WaypointPlan plan;
};

/// Synthesizes both axes at dt_mpc with the accumulated per-tick disturbance.
Controllers prepare(const MissionSpec& spec);

struct SimRecord {
  double t = 0.0;
  Eigen::VectorXd x_long, x_lat;  // true deviation states
  Eigen::VectorXd z_long, z_lat;  // nominal tube centres
  double psi_deg = 0.0;
  double east = 0.0, north = 0.0;
  Eigen::VectorXd u_long, u_lat;  // commanded (pre-saturation) inputs in effect
  double v_ref = 0.0, h_ref = 0.0, heading_ref_deg = 0.0, roll_ref_deg = 0.0;
  Eigen::VectorXd w_long, w_lat;  // disturbance sampled for this tick
  double eps_r = 0.0;
  int leg = 0;
  double err_v = 0.0, err_h = 0.0;
  std::string events;
};

struct SimTrace {
  std::vector<SimRecord> records;
  /// Wall-clock MPC solve time (both axes) for each record; zero off-tick.
  /// Kept out of the CSV so traces stay byte-reproducible.
  std::vector<double> mpc_solve_time;
  bool mission_complete = false;
};

struct RunMetrics {
  bool mission_complete = false;
  double t_final = 0.0;
  int legs_completed = 0;
  double max_abs_err_v = 0.0;
  double max_abs_err_h = 0.0;
  double max_abs_err_v_straight = 0.0;
  double max_abs_err_h_straight = 0.0;
  double max_abs_cte_straight = 0.0;
  long input_violations = 0;    // commands outside U, any input
  long surface_violations = 0;  // elevator or aileron outside ±limit
  long containment_violations_long = 0;
  long containment_violations_lat = 0;
  long infeasible_long = 0;
  long infeasible_lat = 0;
  long mpc_ticks = 0;
  double max_solve_seconds = 0.0;
};

struct RunOptions {
  std::uint64_t seed = 1;
  airframe::Perturbation plant;
  trmpc::TubeMode tube_mode = trmpc::TubeMode::kConventional;
  int hil_delay_ticks = 0;
  double time_cap = 600.0;
  bool record_trace = true;
};

struct RunResult {
  SimTrace trace;
  RunMetrics metrics;
};

RunOptions default_run_options(const MissionSpec& spec);

/// One deterministic closed-loop run on the given (possibly perturbed) plant.
RunResult run_mission(const MissionSpec& spec, const Controllers& controllers,
                      const RunOptions& options);

/// Tube cross-section extents along u and h (the straight-leg error bounds).
struct ErrorBounds {
  double u = 0.0;
  double h = 0.0;
};
ErrorBounds tube_error_bounds(const trmpc::TubeSynthesis& lon);

struct TimingReport {
  double max_seconds = 0.0;
  double p99_seconds = 0.0;
  long max_step = -1;
  long samples = 0;
  bool pass = true;
};

/// Budget check on per-tick MPC solve times against dt_mpc.
TimingReport timing_probe(const std::vector<double>& solve_times, double dt_mpc);
TimingReport timing_probe(const SimTrace& trace, double dt_mpc);

}  // namespace tubeuav::sim
