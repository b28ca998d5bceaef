#pragma once

#include <string>
#include <vector>

#include "tubeuav/guidance/grid.hpp"
#include "tubeuav/sim/simloop.hpp"

namespace tubeuav::mission {

struct LabeledTrace {
  std::string label;
  const sim::SimTrace* trace = nullptr;
};

/// Plan view: field rectangle, swaths, waypoints and flown paths (east right, north up).
std::string trajectory_svg(const guidance::WaypointPlan& plan, const std::vector<LabeledTrace>& traces);

/// Three stacked panels over time: err_V, err_h and cross-track error, with
/// the tube bounds drawn on the first two.
std::string errors_svg(const sim::SimTrace& trace, const sim::ErrorBounds& bounds);

}  // namespace tubeuav::mission
