#include "tubeuav/mission/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace tubeuav::mission {
namespace {

using nlohmann::json;

constexpr double kDeg = M_PI / 180.0;

const char* kTable = "published parameter table";
const char* kMission = "published mission description";
const char* kTrim = "published reference flight condition";
const char* kAssumed = "assumed";

json diag(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(m(i, i));
  return a;
}

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd to_vec(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<int>(i)) = a[i].get<double>();
  return v;
}

}  // namespace

std::string plant_sampling_name(sim::PlantSampling p) {
  switch (p) {
    case sim::PlantSampling::kNominal: return "nominal";
    case sim::PlantSampling::kVertex: return "vertex";
    case sim::PlantSampling::kUniform: return "uniform";
  }
  return "vertex";
}

sim::PlantSampling plant_sampling_from(const std::string& s) {
  if (s == "nominal") return sim::PlantSampling::kNominal;
  if (s == "vertex") return sim::PlantSampling::kVertex;
  if (s == "uniform") return sim::PlantSampling::kUniform;
  throw std::invalid_argument("run.plant_sampling must be nominal, vertex or uniform");
}

namespace {

void collect_leaves(const json& j, const std::string& prefix, std::vector<std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      collect_leaves(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else {
    out.push_back(prefix);
  }
}

std::string kind_of(const json& j) {
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  return "null";
}

void check_schema(const json& doc, const json& ref, const std::string& prefix,
                  std::vector<std::string>& v) {
  if (!doc.is_object()) {
    v.push_back((prefix.empty() ? "document" : prefix) + ": expected an object");
    return;
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!ref.contains(it.key())) {
      v.push_back("unknown key '" + key + "'");
      continue;
    }
    const json& r = ref.at(it.key());
    if (r.is_object()) {
      check_schema(it.value(), r, key, v);
    } else if (kind_of(it.value()) != kind_of(r)) {
      v.push_back(key + ": expected " + kind_of(r) + ", got " + kind_of(it.value()));
    } else if (r.is_array()) {
      if (it.value().size() != r.size()) {
        v.push_back(key + ": expected " + std::to_string(r.size()) + " entries");
      }
      for (const auto& e : it.value()) {
        if (!e.is_number()) {
          v.push_back(key + ": entries must be numbers");
          break;
        }
      }
    }
  }
}

// Overlays `patch` onto `base`, recording leaves that were set.
void merge(json& base, const json& patch, const std::string& prefix,
           std::vector<std::string>& touched) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      merge(base[it.key()], it.value(), key, touched);
    } else {
      base[it.key()] = it.value();
      std::vector<std::string> leaves;
      collect_leaves(it.value(), key, leaves);
      touched.insert(touched.end(), leaves.begin(), leaves.end());
    }
  }
}

// Runs `fn`, turning any exception into a violation message.
void guard(std::vector<std::string>& v, const std::string& where, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    v.push_back(where + ": " + e.what());
  }
}

sim::MissionSpec spec_from(const json& d) {
  sim::MissionSpec s;
  const json& f = d["field"];
  s.field.origin_east = f["origin_east"];
  s.field.origin_north = f["origin_north"];
  s.field.length_east = f["length_east"];
  s.field.width_north = f["width_north"];
  s.field.grid_spacing = f["grid_spacing"];
  s.field.overlap_frac = f["overlap_frac"];
  s.field.sidelap_frac = f["sidelap_frac"];
  s.field.stabilization_band = f["stabilization_band"];
  s.field.altitude = f["altitude"];

  const json& t = d["trim"];
  s.trim.airspeed = t["airspeed"];
  s.trim.altitude = t["altitude"];
  s.trim.alpha_deg = t["alpha_deg"];
  s.trim.theta_deg = t["theta_deg"];
  s.trim.gamma_deg = t["gamma_deg"];

  auto weights = [](const json& w) {
    trmpc::TubeWeights out;
    out.Q = to_vec(w["q_diag"]).asDiagonal();
    out.R = to_vec(w["r_diag"]).asDiagonal();
    out.N = w["horizon"];
    return out;
  };
  s.weights_long = weights(d["weights"]["long"]);
  s.weights_lat = weights(d["weights"]["lat"]);

  auto limits = [](const json& l) {
    trmpc::AxisLimits out;
    out.state_half_widths = to_vec(l["state_half_widths"]);
    out.input_half_widths = to_vec(l["input_half_widths"]);
    return out;
  };
  s.limits_long = limits(d["limits"]["long"]);
  s.limits_lat = limits(d["limits"]["lat"]);

  s.disturbance.bounds_long = to_vec(d["disturbance"]["long"]);
  s.disturbance.bounds_lat = to_vec(d["disturbance"]["lat"]);
  s.disturbance.seed = d["run"]["seed"];

  s.uncertainty.airspeed = d["uncertainty"]["airspeed"];
  s.uncertainty.mass = d["uncertainty"]["mass"];
  s.uncertainty.inertia = d["uncertainty"]["inertia"];

  s.schedule.dt_plant = d["schedule"]["dt_plant"];
  s.schedule.dt_pid = d["schedule"]["dt_pid"];
  s.schedule.dt_mpc = d["schedule"]["dt_mpc"];

  const json& p = d["pid"];
  s.pid.kp = p["kp"];
  s.pid.ki = p["ki"];
  s.pid.kd = p["kd"];
  s.pid.output_limit = p["output_limit_deg"];
  s.pid.integral_limit = p["integral_limit_deg"];

  const json& g = d["guidance"];
  s.sequencer.acceptance_radius = g["acceptance_radius"];
  s.sequencer.kappa_deg_per_m = g["kappa_deg_per_m"];
  s.sequencer.max_correction_deg = g["max_correction_deg"];
  s.sequencer.airspeed_ref = g["airspeed_ref"];

  const json& y = d["synthesis"];
  s.synthesis.mrpi_eps = y["mrpi_eps"];
  s.synthesis.mrpi_max_terms = y["mrpi_max_terms"];
  s.synthesis.terminal_max_iterations = y["terminal_max_iterations"];

  const json& r = d["run"];
  s.tube_mode = trmpc::tube_mode_from_string(r["tube_mode"].get<std::string>());
  s.hil_delay_ticks = r["hil_delay_ticks"];
  s.time_cap = r["time_cap"];
  return s;
}

bool is_integer(const json& j) {
  return j.is_number_integer() || (j.is_number() && std::floor(j.get<double>()) == j.get<double>());
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  - " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

json default_document() {
  const sim::MissionSpec s;
  const MissionConfig c;
  json d;
  d["field"] = {{"origin_east", s.field.origin_east},
                {"origin_north", s.field.origin_north},
                {"length_east", s.field.length_east},
                {"width_north", s.field.width_north},
                {"grid_spacing", s.field.grid_spacing},
                {"overlap_frac", s.field.overlap_frac},
                {"sidelap_frac", s.field.sidelap_frac},
                {"stabilization_band", s.field.stabilization_band},
                {"altitude", s.field.altitude}};
  d["trim"] = {{"airspeed", s.trim.airspeed},
               {"altitude", s.trim.altitude},
               {"alpha_deg", s.trim.alpha_deg},
               {"theta_deg", s.trim.theta_deg},
               {"gamma_deg", s.trim.gamma_deg}};
  d["aero_table"] = c.aero_table;
  d["weights"]["long"] = {{"q_diag", diag(s.weights_long.Q)},
                          {"r_diag", diag(s.weights_long.R)},
                          {"horizon", s.weights_long.N}};
  d["weights"]["lat"] = {{"q_diag", diag(s.weights_lat.Q)},
                         {"r_diag", diag(s.weights_lat.R)},
                         {"horizon", s.weights_lat.N}};
  d["limits"]["long"] = {{"state_half_widths", vec(s.limits_long.state_half_widths)},
                         {"input_half_widths", vec(s.limits_long.input_half_widths)}};
  d["limits"]["lat"] = {{"state_half_widths", vec(s.limits_lat.state_half_widths)},
                        {"input_half_widths", vec(s.limits_lat.input_half_widths)}};
  d["disturbance"] = {{"long", vec(s.disturbance.bounds_long)},
                      {"lat", vec(s.disturbance.bounds_lat)}};
  d["uncertainty"] = {{"airspeed", s.uncertainty.airspeed},
                      {"mass", s.uncertainty.mass},
                      {"inertia", s.uncertainty.inertia}};
  d["schedule"] = {{"dt_plant", s.schedule.dt_plant},
                   {"dt_pid", s.schedule.dt_pid},
                   {"dt_mpc", s.schedule.dt_mpc}};
  d["pid"] = {{"kp", s.pid.kp},
              {"ki", s.pid.ki},
              {"kd", s.pid.kd},
              {"output_limit_deg", s.pid.output_limit},
              {"integral_limit_deg", s.pid.integral_limit}};
  d["guidance"] = {{"acceptance_radius", s.sequencer.acceptance_radius},
                   {"kappa_deg_per_m", s.sequencer.kappa_deg_per_m},
                   {"max_correction_deg", s.sequencer.max_correction_deg},
                   {"airspeed_ref", s.sequencer.airspeed_ref}};
  d["synthesis"] = {{"mrpi_eps", s.synthesis.mrpi_eps},
                    {"mrpi_max_terms", s.synthesis.mrpi_max_terms},
                    {"terminal_max_iterations", s.synthesis.terminal_max_iterations}};
  d["run"] = {{"tube_mode", trmpc::to_string(s.tube_mode)},
              {"hil_delay_ticks", s.hil_delay_ticks},
              {"seed", s.disturbance.seed},
              {"runs", c.runs},
              {"time_cap", s.time_cap},
              {"plant_sampling", plant_sampling_name(c.plant_sampling)}};
  return d;
}

const std::vector<ProvenanceEntry>& provenance_table() {
  static const std::vector<ProvenanceEntry> table = {
      {"field.origin_east", 0.0, kAssumed},
      {"field.origin_north", 0.0, kAssumed},
      {"field.length_east", 200.0, kMission},
      {"field.width_north", 150.0, kMission},
      {"field.grid_spacing", 20.0, kMission},
      {"field.overlap_frac", 0.1, kMission},
      {"field.sidelap_frac", 0.1, kMission},
      {"field.stabilization_band", 10.0, kMission},
      {"field.altitude", 100.0, kMission},
      {"trim.airspeed", 13.5, kTrim},
      {"trim.altitude", 100.0, kTrim},
      {"trim.alpha_deg", 5.18, kTrim},
      {"trim.theta_deg", 5.18, kTrim},
      {"trim.gamma_deg", 0.0, kTrim},
      {"aero_table", "", "assumed: bundled placeholder derivatives"},
      {"weights.long.q_diag", json::array({1e6, 40.0, 40.0, 40.0, 1e5}), kTable},
      {"weights.long.r_diag", json::array({400.0, 3e-6}), kTable},
      {"weights.long.horizon", 15, kTable},
      {"weights.lat.q_diag", json::array({10.0, 10.0, 10.0, 1e4}), kTable},
      {"weights.lat.r_diag", json::array({1e6}), kTable},
      {"weights.lat.horizon", 15, kTable},
      {"limits.long.state_half_widths",
       json::array({5.0, 10 * kDeg, 20 * kDeg, 60 * kDeg, 20.0}), kAssumed},
      {"limits.long.input_half_widths", json::array({0.5, 25 * kDeg}),
       "published mission description (surface limit); throttle assumed"},
      {"limits.lat.state_half_widths", json::array({5.0, 120 * kDeg, 60 * kDeg, 45 * kDeg}),
       kAssumed},
      {"limits.lat.input_half_widths", json::array({25 * kDeg}), kMission},
      {"disturbance.long", json::array({1e-2, 1e-6, 1e-6, 1e-6, 1e-3}), kMission},
      {"disturbance.lat", json::array({1e-2, 1e-6, 1e-6, 1e-6}), kMission},
      {"uncertainty.airspeed", 0.1, kMission},
      {"uncertainty.mass", 0.1, kMission},
      {"uncertainty.inertia", 0.1, kMission},
      {"schedule.dt_plant", 0.01, kTable},
      {"schedule.dt_pid", 0.05, kTable},
      {"schedule.dt_mpc", 0.1, kTable},
      {"pid.kp", 1.5, kAssumed},
      {"pid.ki", 0.05, kAssumed},
      {"pid.kd", 0.3, kAssumed},
      {"pid.output_limit_deg", 30.0, kAssumed},
      {"pid.integral_limit_deg", 10.0, kAssumed},
      {"guidance.acceptance_radius", 15.0, kAssumed},
      {"guidance.kappa_deg_per_m", 1.0, kAssumed},
      {"guidance.max_correction_deg", 45.0, kAssumed},
      {"guidance.airspeed_ref", 13.5, kTrim},
      {"synthesis.mrpi_eps", 1e-3, kAssumed},
      {"synthesis.mrpi_max_terms", 200, kAssumed},
      {"synthesis.terminal_max_iterations", 100, kAssumed},
      {"run.tube_mode", "conventional", kAssumed},
      {"run.hil_delay_ticks", 0, kAssumed},
      {"run.seed", 1, kAssumed},
      {"run.runs", 1, kAssumed},
      {"run.time_cap", 600.0, "assumed, within the stated endurance"},
      {"run.plant_sampling", "vertex", kAssumed},
  };
  return table;
}

std::vector<std::string> leaf_keys(const json& doc) {
  std::vector<std::string> out;
  collect_leaves(doc, "", out);
  return out;
}

void apply_override(json& doc, const std::string& assignment, std::vector<std::string>* touched) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError({"override '" + assignment + "' is not KEY=VALUE"});
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }

  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  std::string walked;
  std::string leaf;  // array elements count as setting the whole array
  while (std::getline(parts, part, '.')) {
    if (node->is_array() && leaf.empty()) leaf = walked;
    walked += (walked.empty() ? "" : ".") + part;
    if (node->is_object()) {
      if (!node->contains(part)) throw ConfigError({"unknown key '" + walked + "'"});
      node = &(*node)[part];
    } else if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw ConfigError({"'" + walked + "': array index expected"});
      }
      if (idx >= node->size()) throw ConfigError({"'" + walked + "': index out of range"});
      node = &(*node)[idx];
    } else {
      throw ConfigError({"'" + walked + "' is not a section"});
    }
  }
  *node = value;
  if (touched) touched->push_back(leaf.empty() ? key : leaf);
}

LoadedConfig load_document(const std::string& path, const std::vector<std::string>& overrides) {
  LoadedConfig out;
  out.document = default_document();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
    json file;
    try {
      file = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError({"config file '" + path + "': " + e.what()});
    }
    std::vector<std::string> v;
    check_schema(file, out.document, "", v);
    if (!v.empty()) throw ConfigError(v);
    merge(out.document, file, "", out.explicit_keys);
    out.base_dir = std::filesystem::path(path).parent_path().string();
  }
  for (const auto& o : overrides) apply_override(out.document, o, &out.explicit_keys);
  return out;
}

std::vector<std::string> check_document(const json& doc) {
  std::vector<std::string> v;
  const json ref = default_document();
  check_schema(doc, ref, "", v);
  for (auto it = ref.begin(); it != ref.end(); ++it) {
    if (!doc.contains(it.key())) v.push_back("missing section '" + it.key() + "'");
  }
  if (!v.empty()) return v;

  for (const char* key : {"weights.long.horizon", "weights.lat.horizon", "run.hil_delay_ticks",
                          "run.seed", "run.runs", "synthesis.mrpi_max_terms",
                          "synthesis.terminal_max_iterations"}) {
    const json* node = &doc;
    std::stringstream parts(key);
    std::string part;
    while (std::getline(parts, part, '.')) node = &(*node)[part];
    if (!is_integer(*node)) v.push_back(std::string(key) + ": expected an integer");
  }
  if (!v.empty()) return v;

  guard(v, "run.tube_mode", [&] { trmpc::tube_mode_from_string(doc["run"]["tube_mode"]); });
  if (!v.empty()) return v;

  sim::MissionSpec s;
  guard(v, "document", [&] { s = spec_from(doc); });
  if (!v.empty()) return v;

  guard(v, "field", [&] { s.field.validate(); });
  if (!(s.field.altitude > 0.0)) v.push_back("field.altitude must be positive");
  guard(v, "trim", [&] { s.trim.validate(); });
  if (!(s.trim.altitude > 0.0)) v.push_back("trim.altitude must be positive");
  guard(v, "schedule", [&] { s.schedule.validate(); });
  guard(v, "weights.long", [&] { s.weights_long.validate(5, 2); });
  guard(v, "weights.lat", [&] { s.weights_lat.validate(4, 1); });
  auto positive = [&](const Eigen::VectorXd& x, const std::string& key) {
    if (!(x.minCoeff() > 0.0) || !x.allFinite()) v.push_back(key + ": entries must be positive");
  };
  positive(s.limits_long.state_half_widths, "limits.long.state_half_widths");
  positive(s.limits_long.input_half_widths, "limits.long.input_half_widths");
  positive(s.limits_lat.state_half_widths, "limits.lat.state_half_widths");
  positive(s.limits_lat.input_half_widths, "limits.lat.input_half_widths");
  guard(v, "disturbance", [&] { s.disturbance.validate(); });
  guard(v, "uncertainty", [&] { s.uncertainty.validate(); });
  guard(v, "pid", [&] { s.pid.validate(); });
  if (!(s.sequencer.acceptance_radius > 0.0)) v.push_back("guidance.acceptance_radius must be positive");
  if (!(s.sequencer.max_correction_deg > 0.0)) v.push_back("guidance.max_correction_deg must be positive");
  if (!(s.sequencer.airspeed_ref > 0.0)) v.push_back("guidance.airspeed_ref must be positive");
  if (!(s.synthesis.mrpi_eps > 0.0)) v.push_back("synthesis.mrpi_eps must be positive");
  if (s.synthesis.mrpi_max_terms < 1) v.push_back("synthesis.mrpi_max_terms must be at least 1");
  if (s.synthesis.terminal_max_iterations < 1) {
    v.push_back("synthesis.terminal_max_iterations must be at least 1");
  }
  if (s.hil_delay_ticks < 0) v.push_back("run.hil_delay_ticks must be non-negative");
  if (!(s.time_cap > 0.0)) v.push_back("run.time_cap must be positive");
  if (doc["run"]["runs"].get<double>() < 1) v.push_back("run.runs must be at least 1");
  if (doc["run"]["seed"].get<double>() < 0) v.push_back("run.seed must be non-negative");
  guard(v, "run", [&] { plant_sampling_from(doc["run"]["plant_sampling"].get<std::string>()); });
  return v;
}

MissionConfig build_config(const LoadedConfig& loaded) {
  const std::vector<std::string> v = check_document(loaded.document);
  if (!v.empty()) throw ConfigError(v);

  MissionConfig c;
  c.spec = spec_from(loaded.document);
  c.runs = loaded.document["run"]["runs"];
  c.plant_sampling = plant_sampling_from(loaded.document["run"]["plant_sampling"]);
  c.aero_table = loaded.document["aero_table"];
  if (!c.aero_table.empty()) {
    std::filesystem::path p(c.aero_table);
    if (p.is_relative() && !loaded.base_dir.empty()) p = std::filesystem::path(loaded.base_dir) / p;
    try {
      c.spec.aero = airframe::AeroDerivativeTable::load(p.string());
      c.spec.aero.check_complete();
    } catch (const std::exception& e) {
      throw ConfigError({"aero_table: " + std::string(e.what())});
    }
  }
  return c;
}

}  // namespace tubeuav::mission
