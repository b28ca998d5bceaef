#include "tubeuav/sim/simloop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

#include "tubeuav/guidance/path.hpp"

namespace tubeuav::sim {
namespace {

constexpr double kDeg = M_PI / 180.0;

int tick_ratio(double dt, double base, const char* name) {
  if (!(dt > 0.0)) throw std::invalid_argument(std::string("RateSchedule: ") + name + " must be positive");
  const double r = dt / base;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, r)) {
    throw std::invalid_argument(std::string("RateSchedule: ") + name +
                                " is not an integer multiple of dt_plant");
  }
  return static_cast<int>(n);
}

Eigen::VectorXd sample_box(std::mt19937_64& rng, const Eigen::VectorXd& half) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd w(half.size());
  for (int i = 0; i < half.size(); ++i) w(i) = unit(rng) * half(i);
  return w;
}

std::vector<airframe::LinearModel> vertex_family(const airframe::LinearModel& model_d,
                                                 const airframe::UncertaintySpec& spec) {
  std::vector<airframe::LinearModel> out{model_d};
  if (spec.airspeed == 0.0 && spec.mass == 0.0 && spec.inertia == 0.0) return out;
  for (auto& v : airframe::perturb_vertices(model_d, spec)) out.push_back(std::move(v));
  return out;
}

std::shared_ptr<const trmpc::TubeSynthesis> synthesize_axis(
    const airframe::LinearModel& cont, const MissionSpec& spec, const Eigen::VectorXd& w_plant,
    const trmpc::AxisLimits& limits, const trmpc::TubeWeights& weights) {
  const auto model_d = airframe::discretize(cont, spec.schedule.dt_mpc);
  const auto fine = airframe::discretize(cont, spec.schedule.dt_plant);
  const Eigen::VectorXd w_step =
      trmpc::accumulated_disturbance_box(fine.A, w_plant, spec.schedule.mpc_ticks());
  return std::make_shared<trmpc::TubeSynthesis>(trmpc::synthesize_tube(
      vertex_family(model_d, spec.uncertainty), setcalc::Polytope::box(limits.state_half_widths),
      setcalc::Polytope::box(limits.input_half_widths), setcalc::Polytope::box(w_step), weights,
      spec.synthesis));
}

bool outside(const Eigen::VectorXd& u, const Eigen::VectorXd& half, int index) {
  return std::abs(u(index)) > half(index) + 1e-9;
}

void append_event(std::string& events, const std::string& e) {
  if (!events.empty()) events += ';';
  events += e;
}

}  // namespace

void RateSchedule::validate() const {
  if (!(dt_plant > 0.0)) throw std::invalid_argument("RateSchedule: dt_plant must be positive");
  const int pid = tick_ratio(dt_pid, dt_plant, "dt_pid");
  const int mpc = tick_ratio(dt_mpc, dt_plant, "dt_mpc");
  if (mpc % pid != 0) {
    throw std::invalid_argument("RateSchedule: dt_mpc is not an integer multiple of dt_pid");
  }
}

int RateSchedule::pid_ticks() const { return tick_ratio(dt_pid, dt_plant, "dt_pid"); }
int RateSchedule::mpc_ticks() const { return tick_ratio(dt_mpc, dt_plant, "dt_mpc"); }

void DisturbanceSpec::validate() const {
  if (bounds_long.size() != 5) throw std::invalid_argument("DisturbanceSpec: bounds_long needs 5 entries");
  if (bounds_lat.size() != 4) throw std::invalid_argument("DisturbanceSpec: bounds_lat needs 4 entries");
  if (!bounds_long.allFinite() || !bounds_lat.allFinite() || bounds_long.minCoeff() < 0.0 ||
      bounds_lat.minCoeff() < 0.0) {
    throw std::invalid_argument("DisturbanceSpec: bounds must be finite and non-negative");
  }
}

Controllers prepare(const MissionSpec& spec) {
  spec.schedule.validate();
  spec.disturbance.validate();
  spec.trim.validate();
  spec.uncertainty.validate();
  Controllers c;
  c.models = airframe::build_mh850_models(spec.trim, spec.aero);
  c.lon = synthesize_axis(c.models.longitudinal, spec, spec.disturbance.bounds_long,
                          spec.limits_long, spec.weights_long);
  c.lat = synthesize_axis(c.models.lateral, spec, spec.disturbance.bounds_lat, spec.limits_lat,
                          spec.weights_lat);
  c.plan = guidance::make_snake_grid(spec.field);
  return c;
}

RunOptions default_run_options(const MissionSpec& spec) {
  RunOptions o;
  o.seed = spec.disturbance.seed;
  o.tube_mode = spec.tube_mode;
  o.hil_delay_ticks = spec.hil_delay_ticks;
  o.time_cap = spec.time_cap;
  return o;
}

ErrorBounds tube_error_bounds(const trmpc::TubeSynthesis& lon) {
  const int n = lon.S.dim();
  const int iu = lon.model_d.state_index("u");
  const int ih = lon.model_d.state_index("h");
  auto extent = [&](int i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
    return std::max(lon.S.support(e), lon.S.support(-e));
  };
  return {extent(iu), extent(ih)};
}

RunResult run_mission(const MissionSpec& spec, const Controllers& controllers,
                      const RunOptions& options) {
  const RateSchedule& rs = spec.schedule;
  rs.validate();
  if (options.hil_delay_ticks < 0) throw std::invalid_argument("run_mission: negative delay");
  if (!(options.time_cap > 0.0)) throw std::invalid_argument("run_mission: time cap must be positive");
  const int pid_ticks = rs.pid_ticks();
  const int mpc_ticks = rs.mpc_ticks();
  const auto& plan = controllers.plan;
  plan.validate();

  const auto plant_lon = airframe::discretize(
      airframe::perturb(controllers.models.longitudinal, options.plant), rs.dt_plant);
  const auto plant_lat = airframe::discretize(
      airframe::perturb(controllers.models.lateral, options.plant), rs.dt_plant);
  const Eigen::VectorXd u_lim_lon = spec.limits_long.input_half_widths;
  const Eigen::VectorXd u_lim_lat = spec.limits_lat.input_half_widths;
  const int elevator = plant_lon.input_index("elevator");
  const int aileron = plant_lat.input_index("aileron");
  const int iu = plant_lon.state_index("u");
  const int ih = plant_lon.state_index("h");
  const int iphi = plant_lat.state_index("phi");

  trmpc::TubeMpc mpc_lon(controllers.lon, options.tube_mode);
  trmpc::TubeMpc mpc_lat(controllers.lat, options.tube_mode);
  guidance::WaypointSequencer sequencer(plan, spec.sequencer);
  guidance::HeadingPid pid(spec.pid);
  std::mt19937_64 rng(options.seed);

  const double v0 = spec.trim.airspeed;
  const double h0 = spec.trim.altitude;
  Eigen::VectorXd x_lon = Eigen::VectorXd::Zero(plant_lon.num_states());
  Eigen::VectorXd x_lat = Eigen::VectorXd::Zero(plant_lat.num_states());
  Eigen::VectorXd u_lon = Eigen::VectorXd::Zero(plant_lon.num_inputs());
  Eigen::VectorXd u_lat = Eigen::VectorXd::Zero(plant_lat.num_inputs());
  Eigen::VectorXd z_lon = x_lon, z_lat = x_lat;
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pending;

  const auto& w0 = plan.waypoints[plan.start_index];
  const auto& w1 = plan.waypoints[plan.start_index + 1];
  guidance::Position pos(w0.east, w0.north);
  double psi_deg = guidance::bearing_deg(pos, guidance::Position(w1.east, w1.north));
  if (psi_deg < 0.0) psi_deg += 360.0;

  RunResult result;
  RunMetrics& m = result.metrics;
  SimTrace& trace = result.trace;
  guidance::GuidanceCommand cmd;
  double roll_ref_deg = 0.0;
  int last_leg = plan.start_index;
  const guidance::FieldSpec& field = plan.field;

  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * rs.dt_plant;
    SimRecord rec;
    bool stop = false;

    if (k % pid_ticks == 0) {
      cmd = sequencer.update(pos);
      if (cmd.leg != last_leg) {
        append_event(rec.events, "leg:" + std::to_string(cmd.leg));
        last_leg = cmd.leg;
      }
      if (cmd.mission_complete) {
        append_event(rec.events, "complete");
        stop = true;
      } else {
        roll_ref_deg = pid.update(cmd.heading_ref_deg, psi_deg, rs.dt_pid);
      }
    }
    if (!stop && t >= options.time_cap - 1e-9) {
      append_event(rec.events, "time-cap");
      stop = true;
    }

    const double dv_ref = cmd.airspeed_ref - v0;
    const double dh_ref = cmd.altitude_ref - h0;
    double solve_seconds = 0.0;
    if (!stop && k % mpc_ticks == 0) {
      ++m.mpc_ticks;
      if (mpc_lon.state().initialized) {
        if (!controllers.lon->S.contains(x_lon - mpc_lon.state().z, 1e-9)) ++m.containment_violations_long;
        if (!controllers.lat->S.contains(x_lat - mpc_lat.state().z, 1e-9)) ++m.containment_violations_lat;
      }
      trmpc::Setpoint sp_lon{{iu, ih}, Eigen::Vector2d(dv_ref, dh_ref)};
      trmpc::Setpoint sp_lat{{iphi}, Eigen::VectorXd::Constant(1, roll_ref_deg * kDeg)};
      const auto out_lon = mpc_lon.step(x_lon, sp_lon);
      const auto out_lat = mpc_lat.step(x_lat, sp_lat);
      solve_seconds = out_lon.solve_seconds + out_lat.solve_seconds;
      m.max_solve_seconds = std::max(m.max_solve_seconds, solve_seconds);
      z_lon = out_lon.z;
      z_lat = out_lat.z;
      if (!out_lon.feasible) {
        ++m.infeasible_long;
        append_event(rec.events, "lon-infeasible:" + out_lon.infeasible_family);
      }
      if (!out_lat.feasible) {
        ++m.infeasible_lat;
        append_event(rec.events, "lat-infeasible:" + out_lat.infeasible_family);
      }
      pending.emplace_back(out_lon.u, out_lat.u);
      if (static_cast<int>(pending.size()) > options.hil_delay_ticks) {
        u_lon = pending.front().first;
        u_lat = pending.front().second;
        pending.pop_front();
        for (int i = 0; i < u_lon.size(); ++i) {
          if (outside(u_lon, u_lim_lon, i)) ++m.input_violations;
        }
        if (outside(u_lat, u_lim_lat, 0)) ++m.input_violations;
        if (outside(u_lon, u_lim_lon, elevator)) ++m.surface_violations;
        if (outside(u_lat, u_lim_lat, aileron)) ++m.surface_violations;
      }
    }

    const double err_v = x_lon(iu) - dv_ref;
    const double err_h = x_lon(ih) - dh_ref;
    m.max_abs_err_v = std::max(m.max_abs_err_v, std::abs(err_v));
    m.max_abs_err_h = std::max(m.max_abs_err_h, std::abs(err_h));
    const bool straight = plan.leg_kind(cmd.leg) == guidance::LegKind::kPass &&
                          pos.x() >= field.origin_east &&
                          pos.x() <= field.origin_east + field.length_east;
    if (straight) {
      m.max_abs_err_v_straight = std::max(m.max_abs_err_v_straight, std::abs(err_v));
      m.max_abs_err_h_straight = std::max(m.max_abs_err_h_straight, std::abs(err_h));
      m.max_abs_cte_straight = std::max(m.max_abs_cte_straight, std::abs(cmd.cross_track));
    }

    const Eigen::VectorXd w_lon =
        stop ? Eigen::VectorXd::Zero(x_lon.size()) : sample_box(rng, spec.disturbance.bounds_long);
    const Eigen::VectorXd w_lat =
        stop ? Eigen::VectorXd::Zero(x_lat.size()) : sample_box(rng, spec.disturbance.bounds_lat);

    if (options.record_trace) {
      rec.t = t;
      rec.x_long = x_lon;
      rec.x_lat = x_lat;
      rec.z_long = z_lon;
      rec.z_lat = z_lat;
      rec.psi_deg = psi_deg;
      rec.east = pos.x();
      rec.north = pos.y();
      rec.u_long = u_lon;
      rec.u_lat = u_lat;
      rec.v_ref = cmd.airspeed_ref;
      rec.h_ref = cmd.altitude_ref;
      rec.heading_ref_deg = cmd.heading_ref_deg;
      rec.roll_ref_deg = roll_ref_deg;
      rec.w_long = w_lon;
      rec.w_lat = w_lat;
      rec.eps_r = cmd.cross_track;
      rec.leg = cmd.leg;
      rec.err_v = err_v;
      rec.err_h = err_h;
      trace.records.push_back(std::move(rec));
      trace.mpc_solve_time.push_back(solve_seconds);
    }

    if (stop) {
      m.t_final = t;
      m.mission_complete = cmd.mission_complete;
      m.legs_completed = cmd.mission_complete ? plan.num_legs() : cmd.leg - plan.start_index;
      trace.mission_complete = m.mission_complete;
      break;
    }

    // Plant tick: saturated actuators, additive noise, kinematic shell.
    const Eigen::VectorXd ua_lon = u_lon.cwiseMax(-u_lim_lon).cwiseMin(u_lim_lon);
    const Eigen::VectorXd ua_lat = u_lat.cwiseMax(-u_lim_lat).cwiseMin(u_lim_lat);
    const double speed = v0 + x_lon(iu);
    const double psi = psi_deg * kDeg;
    const double psi_rate = airframe::kGravity / v0 * std::tan(x_lat(iphi));
    pos += rs.dt_plant * speed * guidance::Position(std::sin(psi), std::cos(psi));
    psi_deg = std::fmod(psi_deg + rs.dt_plant * psi_rate / kDeg, 360.0);
    if (psi_deg < 0.0) psi_deg += 360.0;
    x_lon = plant_lon.A * x_lon + plant_lon.B * ua_lon + w_lon;
    x_lat = plant_lat.A * x_lat + plant_lat.B * ua_lat + w_lat;
    if (!x_lon.allFinite() || !x_lat.allFinite() || !pos.allFinite()) {
      throw SimulationError("run_mission: non-finite state at step " + std::to_string(k + 1), k + 1);
    }
    if (std::abs(x_lat(iphi)) >= 0.5 * M_PI) {
      throw SimulationError("run_mission: bank angle reached 90 deg at step " + std::to_string(k + 1),
                            k + 1);
    }
  }
  return result;
}

TimingReport timing_probe(const std::vector<double>& solve_times, double dt_mpc) {
  TimingReport r;
  std::vector<double> samples;
  for (std::size_t i = 0; i < solve_times.size(); ++i) {
    const double s = solve_times[i];
    if (s <= 0.0) continue;
    samples.push_back(s);
    if (s > r.max_seconds) {
      r.max_seconds = s;
      r.max_step = static_cast<long>(i);
    }
  }
  r.samples = static_cast<long>(samples.size());
  if (!samples.empty()) {
    std::sort(samples.begin(), samples.end());
    const auto idx = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(samples.size()))) - 1;
    r.p99_seconds = samples[std::min(idx, samples.size() - 1)];
  }
  r.pass = r.max_seconds < dt_mpc;
  return r;
}

TimingReport timing_probe(const SimTrace& trace, double dt_mpc) {
  return timing_probe(trace.mpc_solve_time, dt_mpc);
}

}  // namespace tubeuav::sim
