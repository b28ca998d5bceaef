#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace tubeuav::guidance {

class GuidanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldSpec {
  double origin_east = 0.0;   // m, south-west corner
  double origin_north = 0.0;  // m
  double length_east = 200.0;
  double width_north = 150.0;
  double grid_spacing = 20.0;
  double overlap_frac = 0.10;
  double sidelap_frac = 0.10;
  double stabilization_band = 10.0;
  double altitude = 100.0;

  void validate() const;
  double effective_spacing() const { return grid_spacing * (1.0 - sidelap_frac); }
};

struct Waypoint {
  double east = 0.0;
  double north = 0.0;
  double altitude = 0.0;
};

enum class LegKind { kPass, kCrossover };

struct WaypointPlan {
  std::vector<Waypoint> waypoints;
  /// Kind of leg i (waypoints[i] → waypoints[i + 1]); empty for imported plans.
  std::vector<LegKind> leg_kinds;
  double min_turn_radius = 0.0;
  int start_index = 0;
  /// Swath width and field the plan was generated for, when known.
  double swath_width = 0.0;
  FieldSpec field;

  int num_legs() const { return static_cast<int>(waypoints.size()) - 1; }
  LegKind leg_kind(int leg) const;
  double leg_length(int leg) const;
  void validate() const;
};

/// Boustrophedon passes parallel to East, stepped North by the effective
/// spacing, extended by the stabilization band at both ends.
WaypointPlan make_snake_grid(const FieldSpec& field);

/// Waypoint text format: a header line `east_m,north_m,altitude_m` followed by
/// one comma-separated record per waypoint.
void write_waypoints(std::ostream& out, const WaypointPlan& plan);
WaypointPlan read_waypoints(std::istream& in);
void save_waypoints(const std::string& path, const WaypointPlan& plan);
WaypointPlan load_waypoints(const std::string& path);

}  // namespace tubeuav::guidance
