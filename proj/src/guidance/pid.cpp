#include "tubeuav/guidance/pid.hpp"

#include <algorithm>
#include <cmath>

#include "tubeuav/guidance/path.hpp"

namespace tubeuav::guidance {

void PidGains::validate() const {
  if (!(output_limit > 0.0)) throw GuidanceError("pid: output limit must be positive");
  if (!(integral_limit >= 0.0)) throw GuidanceError("pid: integral limit must be non-negative");
}

HeadingPid::HeadingPid(PidGains gains) : gains_(gains) { gains_.validate(); }

void HeadingPid::reset() {
  integral_ = 0.0;
  has_last_ = false;
}

double HeadingPid::update(double heading_ref_deg, double heading_deg, double dt) {
  if (!(dt > 0.0)) throw GuidanceError("pid: dt must be positive");
  const double error = wrap_deg(heading_ref_deg - heading_deg);
  double rate = 0.0;
  if (has_last_) rate = wrap_deg(heading_deg - last_heading_) / dt;
  last_heading_ = heading_deg;
  has_last_ = true;
  const double unclamped = gains_.kp * error + integral_ - gains_.kd * rate;
  // Conditional integration: hold the integral while the output is pinned
  // at a limit and the error would push it further.
  const bool pinned = std::abs(unclamped) >= gains_.output_limit && error * unclamped > 0.0;
  if (!pinned) {
    integral_ = std::clamp(integral_ + gains_.ki * error * dt, -gains_.integral_limit,
                           gains_.integral_limit);
  }
  const double out = gains_.kp * error + integral_ - gains_.kd * rate;
  return std::clamp(out, -gains_.output_limit, gains_.output_limit);
}

}  // namespace tubeuav::guidance
