#pragma once

#include "tubeuav/guidance/grid.hpp"
#include "tubeuav/guidance/path.hpp"

namespace tubeuav::guidance {

struct SequencerOptions {
  double acceptance_radius = 15.0;      // m
  double kappa_deg_per_m = 1.0;         // cross-track correction gain
  double max_correction_deg = 45.0;
  double airspeed_ref = 13.5;           // m/s
};

struct GuidanceCommand {
  int leg = 0;
  double heading_ref_deg = 0.0;
  double altitude_ref = 0.0;
  double airspeed_ref = 0.0;
  double cross_track = 0.0;  // signed, m
  double along_track = 0.0;  // distance from the leg start along the leg, m
  bool mission_complete = false;
};

/// Tracks the active leg. A leg is finished when the vehicle comes within
/// the acceptance radius of its end point or passes the perpendicular
/// through it; the leg index never decreases.
class WaypointSequencer {
 public:
  WaypointSequencer(WaypointPlan plan, SequencerOptions options = {});

  GuidanceCommand update(const Position& pos);

  int active_leg() const { return leg_; }
  bool complete() const { return complete_; }
  const WaypointPlan& plan() const { return plan_; }
  const SequencerOptions& options() const { return options_; }

 private:
  Position point(int i) const;

  WaypointPlan plan_;
  SequencerOptions options_;
  int leg_ = 0;
  bool complete_ = false;
};

}  // namespace tubeuav::guidance
