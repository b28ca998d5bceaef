#include "tubeuav/guidance/path.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace tubeuav::guidance {
namespace {

constexpr double kDeg = M_PI / 180.0;

Position left_normal(const Position& d) { return {-d.y(), d.x()}; }

double cross(const Position& a, const Position& b) { return a.x() * b.y() - a.y() * b.x(); }

Position rotate(const Position& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

double compass_deg(const Position& d) { return wrap_deg(std::atan2(d.x(), d.y()) / kDeg); }

}  // namespace

double wrap_deg(double angle) {
  double a = std::fmod(angle, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

double bearing_deg(const Position& from, const Position& to) { return compass_deg(to - from); }

double cross_track_error(const Position& pos, const Position& wp_prev, const Position& wp_next) {
  const Position d = wp_next - wp_prev;
  const double len = d.norm();
  if (len == 0.0) throw GuidanceError("cross_track_error: coincident waypoints");
  // Right of travel is the negative left normal.
  return -(pos - wp_prev).dot(left_normal(d / len));
}

double turn_radius(double speed, double max_bank_deg) {
  if (!(speed > 0.0) || !(max_bank_deg > 0.0 && max_bank_deg < 90.0)) {
    throw GuidanceError("turn_radius: speed must be positive and bank in (0, 90) deg");
  }
  return speed * speed / (kGravity * std::tan(max_bank_deg * kDeg));
}

double SmoothedPath::total_length() const {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.length;
  return total;
}

PathSample SmoothedPath::sample(double s) const {
  if (segments.empty()) throw GuidanceError("sample: empty path");
  s = std::max(0.0, s);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    if (s > seg.length && i + 1 < segments.size()) {
      s -= seg.length;
      continue;
    }
    s = std::min(s, seg.length);
    PathSample out;
    if (seg.kind == PathSegment::Kind::kLine) {
      const Position d = (seg.end - seg.start) / seg.length;
      out.position = seg.start + s * d;
      out.heading_deg = compass_deg(d);
    } else {
      const double angle = seg.turn * s / seg.radius;
      const Position r0 = seg.start - seg.center;
      out.position = seg.center + rotate(r0, angle);
      const Position radial = rotate(r0, angle);
      const Position tangent = seg.turn > 0 ? left_normal(radial) : Position(-left_normal(radial));
      out.heading_deg = compass_deg(tangent);
      out.curvature = seg.turn / seg.radius;
    }
    return out;
  }
  return {};
}

SmoothedPath smooth_trajectory(const WaypointPlan& plan, double speed, double max_bank_deg) {
  plan.validate();
  const double radius = turn_radius(speed, max_bank_deg);
  const auto& w = plan.waypoints;
  const int n = static_cast<int>(w.size());
  auto pos = [&](int i) { return Position(w[i].east, w[i].north); };

  std::vector<double> tangent(n, 0.0);
  std::vector<double> turn_angle(n, 0.0);
  std::set<int> offending;
  for (int i = 1; i + 1 < n; ++i) {
    const Position din = (pos(i) - pos(i - 1)).normalized();
    const Position dout = (pos(i + 1) - pos(i)).normalized();
    const double delta = std::atan2(cross(din, dout), din.dot(dout));
    turn_angle[i] = delta;
    if (std::abs(delta) < 1e-9) continue;
    if (std::abs(delta) > M_PI - 1e-9) {
      offending.insert(i);  // reversal: no finite fillet
      continue;
    }
    tangent[i] = radius * std::tan(std::abs(delta) / 2.0);
  }
  for (int leg = 0; leg + 1 < n; ++leg) {
    if (tangent[leg] + tangent[leg + 1] > plan.leg_length(leg) + 1e-9) {
      if (tangent[leg] > 0.0) offending.insert(leg);
      if (tangent[leg + 1] > 0.0) offending.insert(leg + 1);
    }
  }
  if (!offending.empty()) {
    std::ostringstream msg;
    msg << "smooth_trajectory: legs too short for radius " << radius << " m fillets at waypoints";
    for (int i : offending) msg << ' ' << i;
    throw GuidanceError(msg.str());
  }

  SmoothedPath path;
  path.radius = radius;
  Position cursor = pos(0);
  for (int i = 1; i < n; ++i) {
    const Position din = (pos(i) - pos(i - 1)).normalized();
    const Position line_end = pos(i) - tangent[i] * din;
    if ((line_end - cursor).norm() > 1e-12) {
      PathSegment line;
      line.start = cursor;
      line.end = line_end;
      line.length = (line_end - cursor).norm();
      path.segments.push_back(line);
    }
    cursor = line_end;
    if (i + 1 < n && tangent[i] > 0.0) {
      const Position dout = (pos(i + 1) - pos(i)).normalized();
      PathSegment arc;
      arc.kind = PathSegment::Kind::kArc;
      arc.turn = turn_angle[i] > 0.0 ? 1 : -1;
      arc.radius = radius;
      arc.start = line_end;
      arc.end = pos(i) + tangent[i] * dout;
      arc.center = line_end + arc.turn * radius * left_normal(din);
      arc.length = radius * std::abs(turn_angle[i]);
      path.segments.push_back(arc);
      ++path.arc_count;
      cursor = arc.end;
    }
  }
  return path;
}

}  // namespace tubeuav::guidance
