#include "tubeuav/guidance/sequencer.hpp"

#include <algorithm>

namespace tubeuav::guidance {

WaypointSequencer::WaypointSequencer(WaypointPlan plan, SequencerOptions options)
    : plan_(std::move(plan)), options_(options) {
  plan_.validate();
  if (!(options_.acceptance_radius > 0.0)) throw GuidanceError("sequencer: acceptance radius must be positive");
  if (!(options_.max_correction_deg > 0.0)) throw GuidanceError("sequencer: correction limit must be positive");
  leg_ = plan_.start_index;
}

Position WaypointSequencer::point(int i) const {
  return {plan_.waypoints[i].east, plan_.waypoints[i].north};
}

GuidanceCommand WaypointSequencer::update(const Position& pos) {
  GuidanceCommand cmd;
  while (!complete_) {
    const Position a = point(leg_);
    const Position b = point(leg_ + 1);
    const double length = (b - a).norm();
    const double along = (pos - a).dot(b - a) / length;
    if ((pos - b).norm() > options_.acceptance_radius && along < length) break;
    if (leg_ + 1 >= plan_.num_legs()) {
      complete_ = true;
    } else {
      ++leg_;
    }
  }
  cmd.leg = leg_;
  cmd.mission_complete = complete_;
  cmd.altitude_ref = plan_.waypoints[leg_ + 1].altitude;
  cmd.airspeed_ref = options_.airspeed_ref;
  const Position a = point(leg_);
  const Position b = point(leg_ + 1);
  cmd.cross_track = cross_track_error(pos, a, b);
  cmd.along_track = (pos - a).dot(b - a) / (b - a).norm();
  const double correction = std::clamp(options_.kappa_deg_per_m * cmd.cross_track,
                                       -options_.max_correction_deg, options_.max_correction_deg);
  cmd.heading_ref_deg = wrap_deg(bearing_deg(a, b) - correction);
  return cmd;
}

}  // namespace tubeuav::guidance
