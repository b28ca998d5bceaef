#include "tubeuav/guidance/grid.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tubeuav::guidance {

void FieldSpec::validate() const {
  if (!(length_east > 0.0) || !(width_north > 0.0)) {
    throw GuidanceError("field: degenerate field (length and width must be positive)");
  }
  if (!(grid_spacing > 0.0)) throw GuidanceError("field: grid spacing must be positive");
  if (grid_spacing > width_north) throw GuidanceError("field: grid spacing exceeds field width");
  if (!(sidelap_frac >= 0.0 && sidelap_frac < 1.0) || !(overlap_frac >= 0.0 && overlap_frac < 1.0)) {
    throw GuidanceError("field: overlap and sidelap must be in [0, 1)");
  }
  if (!(stabilization_band >= 0.0)) throw GuidanceError("field: negative stabilization band");
  if (!(altitude > 0.0)) throw GuidanceError("field: altitude must be positive");
}

LegKind WaypointPlan::leg_kind(int leg) const {
  if (leg < 0 || leg >= num_legs()) throw GuidanceError("leg index out of range");
  return leg_kinds.empty() ? LegKind::kPass : leg_kinds[leg];
}

double WaypointPlan::leg_length(int leg) const {
  if (leg < 0 || leg >= num_legs()) throw GuidanceError("leg index out of range");
  const auto& a = waypoints[leg];
  const auto& b = waypoints[leg + 1];
  return std::hypot(b.east - a.east, b.north - a.north);
}

void WaypointPlan::validate() const {
  if (waypoints.size() < 2) throw GuidanceError("plan: at least two waypoints are required");
  if (!leg_kinds.empty() && static_cast<int>(leg_kinds.size()) != num_legs()) {
    throw GuidanceError("plan: leg kind count does not match the waypoints");
  }
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (waypoints[i].altitude != waypoints.front().altitude) {
      throw GuidanceError("plan: all waypoints must share one altitude");
    }
    if (i > 0 && leg_length(static_cast<int>(i) - 1) <= 0.0) {
      throw GuidanceError("plan: waypoints " + std::to_string(i - 1) + " and " +
                          std::to_string(i) + " coincide");
    }
  }
  if (start_index < 0 || start_index >= num_legs()) throw GuidanceError("plan: bad start index");
}

WaypointPlan make_snake_grid(const FieldSpec& field) {
  field.validate();
  const double spacing = field.effective_spacing();
  const int passes = static_cast<int>(std::ceil(field.width_north / spacing - 1e-12)) + 1;
  const double west = field.origin_east - field.stabilization_band;
  const double east = field.origin_east + field.length_east + field.stabilization_band;

  WaypointPlan plan;
  plan.field = field;
  plan.swath_width = field.grid_spacing;
  for (int k = 0; k < passes; ++k) {
    const double north = field.origin_north + k * spacing;
    const bool eastbound = k % 2 == 0;
    plan.waypoints.push_back({eastbound ? west : east, north, field.altitude});
    plan.waypoints.push_back({eastbound ? east : west, north, field.altitude});
    if (k > 0) plan.leg_kinds.push_back(LegKind::kCrossover);
    plan.leg_kinds.push_back(LegKind::kPass);
  }
  plan.validate();
  return plan;
}

void write_waypoints(std::ostream& out, const WaypointPlan& plan) {
  out << "east_m,north_m,altitude_m\n" << std::setprecision(17);
  for (const auto& w : plan.waypoints) out << w.east << ',' << w.north << ',' << w.altitude << '\n';
}

WaypointPlan read_waypoints(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("east_m,north_m,altitude_m", 0) != 0) {
    throw GuidanceError("waypoints: missing header 'east_m,north_m,altitude_m'");
  }
  WaypointPlan plan;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 3; ++k) {
      const auto [ptr, ec] = std::from_chars(p, end, v[k]);
      if (ec != std::errc() || (k < 2 && (ptr == end || *ptr != ',')) || (k == 2 && ptr != end)) {
        throw GuidanceError("waypoints: bad record on line " + std::to_string(lineno));
      }
      p = ptr + 1;
    }
    plan.waypoints.push_back({v[0], v[1], v[2]});
  }
  plan.validate();
  return plan;
}

void save_waypoints(const std::string& path, const WaypointPlan& plan) {
  std::ofstream out(path);
  if (!out) throw GuidanceError("cannot write '" + path + "'");
  write_waypoints(out, plan);
}

WaypointPlan load_waypoints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GuidanceError("cannot open '" + path + "'");
  return read_waypoints(in);
}

}  // namespace tubeuav::guidance
