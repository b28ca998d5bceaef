#include "tubeuav/sim/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace tubeuav::sim {
namespace {

// Uniform grid over polyline vertices; segments are found through their start vertex.
class SegmentIndex {
 public:
  SegmentIndex(const SimTrace& ref, double cell) : cell_(cell) {
    for (const auto& r : ref.records) pts_.emplace_back(r.east, r.north);
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
      max_seg_ = std::max(max_seg_, (pts_[i + 1] - pts_[i]).norm());
      cells_[key(cell_of(pts_[i]))].push_back(i);
    }
  }

  double distance(const Eigen::Vector2d& p) const {
    if (pts_.size() == 1) return (p - pts_[0]).norm();
    const auto c = cell_of(p);
    double best = std::numeric_limits<double>::infinity();
    for (long ring = 0;; ++ring) {
      for (long dx = -ring; dx <= ring; ++dx) {
        for (long dy = -ring; dy <= ring; ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
          const auto it = cells_.find(key({c.first + dx, c.second + dy}));
          if (it == cells_.end()) continue;
          for (std::size_t i : it->second) best = std::min(best, segment_distance(p, i));
        }
      }
      // Anything in a farther ring starts at least ring·cell away.
      if (best <= static_cast<double>(ring) * cell_ - max_seg_) return best;
      if (ring > 100000) return best;
    }
  }

 private:
  using Cell = std::pair<long, long>;
  Cell cell_of(const Eigen::Vector2d& p) const {
    return {static_cast<long>(std::floor(p.x() / cell_)), static_cast<long>(std::floor(p.y() / cell_))};
  }
  static long long key(const Cell& c) { return (static_cast<long long>(c.first) << 32) ^ (c.second & 0xffffffffLL); }

  double segment_distance(const Eigen::Vector2d& p, std::size_t i) const {
    const Eigen::Vector2d a = pts_[i];
    const Eigen::Vector2d ab = pts_[i + 1] - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
  }

  double cell_;
  double max_seg_ = 0.0;
  std::vector<Eigen::Vector2d> pts_;
  std::unordered_map<long long, std::vector<std::size_t>> cells_;
};

}  // namespace

PathDeviation path_deviation(const SimTrace& reference, const SimTrace& test,
                             const guidance::WaypointPlan& plan, double turn_zone_radius) {
  if (reference.records.empty() || test.records.empty()) {
    throw std::invalid_argument("path_deviation: empty trace");
  }
  std::vector<Eigen::Vector2d> turns;
  const auto& w = plan.waypoints;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    const Eigen::Vector2d a(w[i].east - w[i - 1].east, w[i].north - w[i - 1].north);
    const Eigen::Vector2d b(w[i + 1].east - w[i].east, w[i + 1].north - w[i].north);
    if (std::abs(a.x() * b.y() - a.y() * b.x()) > 1e-9 * a.norm() * b.norm() || a.dot(b) < 0.0) {
      turns.emplace_back(w[i].east, w[i].north);
    }
  }

  const SegmentIndex index(reference, 5.0);
  PathDeviation d;
  long n_turn = 0, n_straight = 0;
  for (const auto& r : test.records) {
    const Eigen::Vector2d p(r.east, r.north);
    const double dev = index.distance(p);
    bool near = false;
    for (const auto& t : turns) near = near || (p - t).norm() <= turn_zone_radius;
    if (dev > d.max) {
      d.max = dev;
      d.max_east = p.x();
      d.max_north = p.y();
      d.max_near_turn = near;
    }
    if (near) {
      d.max_turn_zone = std::max(d.max_turn_zone, dev);
      d.mean_turn_zone += dev;
      ++n_turn;
    } else {
      d.max_straight_zone = std::max(d.max_straight_zone, dev);
      d.mean_straight_zone += dev;
      ++n_straight;
    }
  }
  if (n_turn > 0) d.mean_turn_zone /= static_cast<double>(n_turn);
  if (n_straight > 0) d.mean_straight_zone /= static_cast<double>(n_straight);
  d.samples = static_cast<long>(test.records.size());
  return d;
}

}  // namespace tubeuav::sim
