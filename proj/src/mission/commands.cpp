#include "tubeuav/mission/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tubeuav/airframe/models.hpp"
#include "tubeuav/mission/svg.hpp"
#include "tubeuav/sim/monte_carlo.hpp"
#include "tubeuav/sim/trace_io.hpp"

namespace tubeuav::mission {
namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

json axis_report(const trmpc::TubeSynthesis& s, int vertex_count) {
  json a;
  a["gain_method"] = trmpc::to_string(s.gain_method);
  a["K"] = matrix_json(s.K);
  a["P"] = matrix_json(s.P);
  a["horizon"] = s.weights.N;
  a["nominal_radius"] = s.vertex_radii.empty() ? 0.0 : s.vertex_radii.front();
  // vertex_radii[0] is the nominal model; the rest are the uncertainty
  // corners. Without uncertainty the nominal model is the only vertex.
  json corners = json::array();
  const std::size_t first = s.vertex_radii.size() > 1 ? 1 : 0;
  for (std::size_t i = first; i < s.vertex_radii.size(); ++i) corners.push_back(s.vertex_radii[i]);
  a["vertex_radii"] = corners;
  a["vertex_count"] = vertex_count;
  a["mrpi"] = {{"terms", s.mrpi_terms}, {"alpha", s.mrpi_alpha}, {"exact", s.mrpi_exact}};
  a["terminal_iterations"] = s.terminal_iterations;
  a["rows"] = {{"X", s.X.rows()}, {"U", s.U.rows()}, {"W", s.W.rows()}, {"S", s.S.rows()},
               {"Z", s.Z.rows()}, {"V", s.V.rows()}, {"Zf", s.Zf.rows()}};
  json ext = json::object();
  const int n = s.S.dim();
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
    ext[s.model_d.state_names.at(i)] = {-s.S.support(-e), s.S.support(e)};
  }
  a["S_extent"] = ext;
  return a;
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

void print_axis(std::ostream& out, const std::string& name, const json& a) {
  out << name << ": gain " << a["gain_method"].get<std::string>() << ", N=" << a["horizon"]
      << ", nominal radius " << fmt(a["nominal_radius"]) << '\n';
  out << "  vertex radii (" << a["vertex_count"] << "):";
  for (const auto& r : a["vertex_radii"]) out << ' ' << fmt(r.get<double>(), 5);
  out << '\n';
  out << "  K =";
  for (const auto& row : a["K"]) {
    out << " [";
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << fmt(row[j].get<double>(), 5);
    out << ']';
  }
  out << '\n';
  out << "  mRPI terms " << a["mrpi"]["terms"] << ", alpha " << fmt(a["mrpi"]["alpha"])
      << (a["mrpi"]["exact"].get<bool>() ? " (exact)" : "") << ", terminal iterations "
      << a["terminal_iterations"] << '\n';
  out << "  rows:";
  for (auto it = a["rows"].begin(); it != a["rows"].end(); ++it) out << ' ' << it.key() << '=' << it.value();
  out << '\n';
  out << "  S extent:";
  for (auto it = a["S_extent"].begin(); it != a["S_extent"].end(); ++it) {
    out << ' ' << it.key() << " [" << fmt(it.value()[0].get<double>(), 4) << ", "
        << fmt(it.value()[1].get<double>(), 4) << ']';
  }
  out << '\n';
}

json metrics_json(const sim::RunMetrics& m) {
  return {{"mission_complete", m.mission_complete},
          {"t_final", m.t_final},
          {"legs_completed", m.legs_completed},
          {"max_abs_err_v", m.max_abs_err_v},
          {"max_abs_err_h", m.max_abs_err_h},
          {"max_abs_err_v_straight", m.max_abs_err_v_straight},
          {"max_abs_err_h_straight", m.max_abs_err_h_straight},
          {"max_abs_cte_straight", m.max_abs_cte_straight},
          {"input_violations", m.input_violations},
          {"surface_violations", m.surface_violations},
          {"containment_violations_long", m.containment_violations_long},
          {"containment_violations_lat", m.containment_violations_lat},
          {"infeasible_long", m.infeasible_long},
          {"infeasible_lat", m.infeasible_lat},
          {"mpc_ticks", m.mpc_ticks},
          {"max_solve_seconds", m.max_solve_seconds}};
}

json mode_json(const sim::ModeSummary& s) {
  json failures = json::array();
  for (const auto& f : s.failures) {
    failures.push_back({{"run", f.run}, {"step", f.step}, {"message", f.message}});
  }
  return {{"mode", trmpc::to_string(s.mode)},
          {"runs", s.runs},
          {"completed", s.completed},
          {"max_abs_err_v", s.max_abs_err_v},
          {"max_abs_err_h", s.max_abs_err_h},
          {"max_abs_err_v_straight", s.max_abs_err_v_straight},
          {"max_abs_err_h_straight", s.max_abs_err_h_straight},
          {"max_abs_cte_straight", s.max_abs_cte_straight},
          {"input_violations", s.input_violations},
          {"surface_violations", s.surface_violations},
          {"containment_violations_long", s.containment_violations_long},
          {"containment_violations_lat", s.containment_violations_lat},
          {"infeasible_long", s.infeasible_long},
          {"infeasible_lat", s.infeasible_lat},
          {"mpc_ticks", s.mpc_ticks},
          {"max_solve_seconds", s.max_solve_seconds},
          {"failures", failures}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

int vertex_count(const sim::MissionSpec& spec) {
  return static_cast<int>(airframe::vertex_perturbations(spec.uncertainty).size());
}

// Maps every failure class to its exit code.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error:\n";
    for (const auto& v : e.violations()) err << "  " << v << '\n';
    return kExitConfig;
  } catch (const setcalc::SetError& e) {
    err << "synthesis error: " << e.what() << '\n';
    return kExitSynthesis;
  } catch (const trmpc::SynthesisError& e) {
    err << "synthesis error: " << e.what() << '\n';
    return kExitSynthesis;
  } catch (const sim::SimulationError& e) {
    err << "simulation error at step " << e.step() << ": " << e.what() << '\n';
    return kExitSimulation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace

LoadedConfig load_cli_config(const CliOptions& o) {
  std::vector<std::string> assignments = o.overrides;
  if (o.runs) assignments.push_back("run.runs=" + std::to_string(*o.runs));
  if (o.seed) assignments.push_back("run.seed=" + std::to_string(*o.seed));
  if (o.tube_mode) assignments.push_back("run.tube_mode=" + json(*o.tube_mode).dump());
  if (o.hil_delay_ticks) assignments.push_back("run.hil_delay_ticks=" + std::to_string(*o.hil_delay_ticks));
  try {
    return load_document(o.config, assignments);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError({e.what()});
  }
}

json synthesis_report(const sim::MissionSpec& spec, const sim::Controllers& c) {
  const int vc = vertex_count(spec);
  json r;
  r["dt_mpc"] = spec.schedule.dt_mpc;
  r["longitudinal"] = axis_report(*c.lon, vc);
  r["lateral"] = axis_report(*c.lat, vc);
  return r;
}

int cmd_validate(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LoadedConfig loaded = load_cli_config(options);
    std::vector<std::string> violations = check_document(loaded.document);
    std::optional<MissionConfig> cfg;
    if (violations.empty()) {
      try {
        cfg = build_config(loaded);
      } catch (const ConfigError& e) {
        violations = e.violations();
      }
    }
    if (cfg) {
      try {
        sim::prepare(cfg->spec);
      } catch (const std::exception& e) {
        violations.push_back(std::string("set precheck: ") + e.what());
      }
    }

    out << "violations: " << violations.size() << '\n';
    for (const auto& v : violations) out << "  " << v << '\n';

    std::vector<std::string> defaulted;
    for (const auto& p : provenance_table()) {
      if (std::find(loaded.explicit_keys.begin(), loaded.explicit_keys.end(), p.key) ==
          loaded.explicit_keys.end()) {
        defaulted.push_back(p.key);
      }
    }
    out << "defaulted fields: " << defaulted.size() << '\n';
    for (const auto& p : provenance_table()) {
      if (std::find(defaulted.begin(), defaulted.end(), p.key) == defaulted.end()) continue;
      out << "  " << p.key << " = " << p.value.dump() << "  [" << p.source << "]\n";
    }
    if (!violations.empty()) {
      err << "config is invalid (" << violations.size() << " violation"
          << (violations.size() == 1 ? "" : "s") << ")\n";
      return static_cast<int>(kExitConfig);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_synth(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MissionConfig cfg = build_config(load_cli_config(options));
    const sim::Controllers c = sim::prepare(cfg.spec);
    const json report = synthesis_report(cfg.spec, c);
    print_axis(out, "longitudinal", report["longitudinal"]);
    print_axis(out, "lateral", report["lateral"]);
    if (!options.out.empty()) {
      std::filesystem::create_directories(options.out);
      const auto path = std::filesystem::path(options.out) / "synthesis.json";
      write_file(path, report.dump(2) + "\n");
      out << "wrote " << path.string() << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_fly(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LoadedConfig loaded = load_cli_config(options);
    const MissionConfig cfg = build_config(loaded);
    const sim::Controllers c = sim::prepare(cfg.spec);
    const sim::RunResult run = sim::run_mission(cfg.spec, c, sim::default_run_options(cfg.spec));
    const sim::ErrorBounds bounds = sim::tube_error_bounds(*c.lon);
    const sim::TimingReport timing = sim::timing_probe(run.trace, cfg.spec.schedule.dt_mpc);

    const std::filesystem::path dir = options.out.empty() ? "." : options.out;
    std::filesystem::create_directories(dir);
    sim::save_trace_csv((dir / "trace.csv").string(), run.trace);
    write_file(dir / "trajectory.svg", trajectory_svg(c.plan, {{"flown path", &run.trace}}));
    write_file(dir / "errors.svg", errors_svg(run.trace, bounds));

    json summary;
    summary["config"] = loaded.document;
    summary["run"] = metrics_json(run.metrics);
    summary["legs_total"] = c.plan.num_legs();
    summary["error_bounds"] = {{"err_v", bounds.u}, {"err_h", bounds.h}};
    summary["timing"] = {{"max_seconds", timing.max_seconds},
                         {"p99_seconds", timing.p99_seconds},
                         {"samples", timing.samples},
                         {"budget_seconds", cfg.spec.schedule.dt_mpc},
                         {"pass", timing.pass}};

    const auto& m = run.metrics;
    out << (m.mission_complete ? "mission complete" : "mission incomplete") << " at t=" << fmt(m.t_final)
        << " s, legs " << m.legs_completed << '/' << c.plan.num_legs() << '\n';
    out << "straight legs: max |err_V| " << fmt(m.max_abs_err_v_straight, 4) << " (bound "
        << fmt(bounds.u, 4) << "), max |err_h| " << fmt(m.max_abs_err_h_straight, 4) << " (bound "
        << fmt(bounds.h, 4) << ")\n";
    out << "violations: input " << m.input_violations << ", surface " << m.surface_violations
        << ", containment " << m.containment_violations_long + m.containment_violations_lat << '\n';
    out << "solve time: max " << fmt(timing.max_seconds * 1e3, 3) << " ms, p99 "
        << fmt(timing.p99_seconds * 1e3, 3) << " ms\n";

    if (cfg.runs > 1) {
      sim::MonteCarloOptions mc;
      mc.runs = cfg.runs;
      mc.base_seed = cfg.spec.disturbance.seed;
      mc.plant = cfg.plant_sampling;
      mc.modes = {cfg.spec.tube_mode};
      const sim::MonteCarloSummary s = sim::monte_carlo(cfg.spec, c, mc);
      json modes = json::array();
      for (const auto& ms : s.modes) {
        modes.push_back(mode_json(ms));
        out << "monte carlo (" << trmpc::to_string(ms.mode) << "): " << ms.completed << '/' << ms.runs
            << " complete, surface violations " << ms.surface_violations << ", containment violations "
            << ms.containment_violations_long + ms.containment_violations_lat << ", failures "
            << ms.failures.size() << '\n';
      }
      summary["monte_carlo"] = {{"runs", cfg.runs},
                                {"base_seed", mc.base_seed},
                                {"plant_sampling", plant_sampling_name(mc.plant)},
                                {"modes", modes}};
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    out << "wrote trace.csv, summary.json, trajectory.svg, errors.svg to " << dir.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tube MPC survey mission toolkit", "tubeuav"};
  app.require_subcommand(1, 1);
  CliOptions o;
  int runs = 0, delay = 0;
  std::uint64_t seed = 0;
  std::string mode;
  app.add_option("--config", o.config, "Mission config file (JSON, comments allowed)");
  app.add_option("--out", o.out, "Output directory");
  auto* runs_opt = app.add_option("--runs", runs, "Monte Carlo run count")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Disturbance seed");
  auto* mode_opt = app.add_option("--tube-mode", mode, "Tube mode")
                       ->check(CLI::IsMember({"literal", "conventional"}));
  auto* delay_opt = app.add_option("--hil-delay-ticks", delay, "Controller output delay in MPC ticks")
                        ->check(CLI::NonNegativeNumber);
  app.add_option("--override", o.overrides, "KEY=VALUE, dotted key (repeatable)");

  auto* validate = app.add_subcommand("validate", "Check a config and list defaulted fields")->fallthrough();
  auto* synth = app.add_subcommand("synth", "Synthesize both tube controllers and report")->fallthrough();
  auto* fly = app.add_subcommand("fly", "Fly the mission and write trace, summary and plots")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kExitOk) : static_cast<int>(kExitConfig);
  }
  if (*runs_opt) o.runs = runs;
  if (*seed_opt) o.seed = seed;
  if (*mode_opt) o.tube_mode = mode;
  if (*delay_opt) o.hil_delay_ticks = delay;

  if (validate->parsed()) return cmd_validate(o, out, err);
  if (synth->parsed()) return cmd_synth(o, out, err);
  if (fly->parsed()) return cmd_fly(o, out, err);
  return kExitConfig;
}

}  // namespace tubeuav::mission
