#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tubeuav/guidance/grid.hpp"

namespace tubeuav::guidance {

inline constexpr double kGravity = 9.81;

/// Positions are (east, north) in metres; headings are compass angles
/// (0 = north, 90 deg = east).
using Position = Eigen::Vector2d;

/// Compass bearing from `from` to `to`, in degrees in (−180, 180].
double bearing_deg(const Position& from, const Position& to);

/// Maps an angle in degrees to (−180, 180].
double wrap_deg(double angle);

/// Signed distance from `pos` to the line through the two waypoints,
/// positive when `pos` lies to the right of the direction of travel.
double cross_track_error(const Position& pos, const Position& wp_prev, const Position& wp_next);

/// Coordinated-turn radius V² / (g·tan(bank)).
double turn_radius(double speed, double max_bank_deg);

struct PathSegment {
  enum class Kind { kLine, kArc } kind = Kind::kLine;
  Position start;
  Position end;
  double length = 0.0;
  // Arcs only.
  Position center;
  double radius = 0.0;
  int turn = 0;  // +1 left (counter-clockwise), −1 right
};

struct PathSample {
  Position position;
  double heading_deg = 0.0;
  double curvature = 0.0;  // 1/m, signed: positive for left turns
};

struct SmoothedPath {
  std::vector<PathSegment> segments;
  double radius = 0.0;
  int arc_count = 0;

  double total_length() const;
  PathSample sample(double s) const;
};

/// Inserts a tangent fillet arc of radius V²/(g·tan(max_bank)) at every
/// interior turn. Throws GuidanceError naming the waypoints whose fillets do
/// not fit on their legs.
SmoothedPath smooth_trajectory(const WaypointPlan& plan, double speed, double max_bank_deg);

}  // namespace tubeuav::guidance
