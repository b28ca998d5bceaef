#pragma once

#include "tubeuav/guidance/grid.hpp"
#include "tubeuav/sim/simloop.hpp"

namespace tubeuav::sim {

/// Spatial deviation of one flown path from another: for every sample of
/// `test`, the distance to the nearest point of the `reference` polyline.
struct PathDeviation {
  double max = 0.0;
  double max_east = 0.0, max_north = 0.0;
  bool max_near_turn = false;
  double max_turn_zone = 0.0;
  double max_straight_zone = 0.0;
  double mean_turn_zone = 0.0;
  double mean_straight_zone = 0.0;
  long samples = 0;
};

/// Samples within `turn_zone_radius` of a waypoint where the plan changes
/// direction count as near a turn.
PathDeviation path_deviation(const SimTrace& reference, const SimTrace& test,
                             const guidance::WaypointPlan& plan, double turn_zone_radius);

}  // namespace tubeuav::sim
