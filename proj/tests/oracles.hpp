#pragma once

// Independent reference computations used only by the test suites.

#include <algorithm>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tubeuav/setcalc/polytope.hpp"

namespace tubeuav::testing {

/// Andrew's monotone chain; returns the hull in counter-clockwise order.
inline std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 1e-15) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-15) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  return hull;
}

inline double support_of_points(const std::vector<Eigen::Vector2d>& pts, const Eigen::Vector2d& d) {
  double best = -1e300;
  for (const auto& p : pts) best = std::max(best, d.dot(p));
  return best;
}

/// Brute-force set iteration S ← A S ⊕ W on 2-D point clouds until the
/// support change over 720 directions drops below `tol`.
inline std::vector<Eigen::Vector2d> mrpi_by_iteration_2d(const Eigen::Matrix2d& a,
                                                         const std::vector<Eigen::Vector2d>& w,
                                                         double tol = 1e-6) {
  std::vector<Eigen::Vector2d> s{Eigen::Vector2d::Zero()};
  for (int it = 0; it < 100000; ++it) {
    std::vector<Eigen::Vector2d> next;
    for (const auto& p : s) {
      for (const auto& q : w) next.push_back(a * p + q);
    }
    next = convex_hull_2d(next);
    double change = 0.0;
    for (int k = 0; k < 720; ++k) {
      const double th = k * M_PI / 360.0;
      const Eigen::Vector2d d(std::cos(th), std::sin(th));
      change = std::max(change, support_of_points(next, d) - support_of_points(s, d));
    }
    s = std::move(next);
    if (change < tol) break;
  }
  return s;
}

/// Approximately uniform samples from a bounded polytope by hit-and-run.
inline std::vector<Eigen::VectorXd> hit_and_run(const setcalc::Polytope& p, int count,
                                                std::mt19937_64& rng, int thinning = 20) {
  const int n = p.dim();
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x = p.chebyshev_center();
  std::vector<Eigen::VectorXd> out;
  const auto& A = p.normals();
  const auto& b = p.offsets();
  while (static_cast<int>(out.size()) < count) {
    for (int t = 0; t < thinning; ++t) {
      Eigen::VectorXd d(n);
      for (int j = 0; j < n; ++j) d(j) = gauss(rng);
      d.normalize();
      double lo = -1e300, hi = 1e300;
      const Eigen::VectorXd ad = A * d;
      const Eigen::VectorXd slack = b - A * x;
      for (int i = 0; i < A.rows(); ++i) {
        if (ad(i) > 1e-15) hi = std::min(hi, slack(i) / ad(i));
        if (ad(i) < -1e-15) lo = std::max(lo, slack(i) / ad(i));
      }
      if (!(hi > lo)) continue;
      x += (lo + (hi - lo) * unit(rng)) * d;
    }
    out.push_back(x);
  }
  return out;
}

/// Random convex combination of vertices, with the vertices themselves
/// drawn often (vertex-weighted sampling).
inline Eigen::VectorXd vertex_weighted_sample(const std::vector<Eigen::VectorXd>& vertices,
                                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, vertices.size() - 1);
  if (unit(rng) < 0.5) return vertices[pick(rng)];
  Eigen::VectorXd weights(vertices.size());
  for (auto& w : weights) w = -std::log(std::max(unit(rng), 1e-300));
  weights /= weights.sum();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(vertices.front().size());
  for (std::size_t i = 0; i < vertices.size(); ++i) x += weights(i) * vertices[i];
  return x;
}

}  // namespace tubeuav::testing
