#include <algorithm>
#include <cmath>

#include "tubeuav/setcalc/polytope.hpp"

namespace tubeuav::setcalc {
namespace {

void append_unique_direction(std::vector<Eigen::VectorXd>& dirs, const Eigen::VectorXd& d) {
  const double norm = d.norm();
  if (norm < 1e-14) return;
  const Eigen::VectorXd u = d / norm;
  for (const auto& e : dirs) {
    if (std::abs(std::abs(e.dot(u)) - 1.0) < 1e-12) return;
  }
  dirs.push_back(u);
}

double max_dot(const std::vector<Eigen::VectorXd>& pts, const Eigen::VectorXd& c) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts) best = std::max(best, c.dot(p));
  return best;
}

// Image of a polytope under a 2-row map, traced one edge at a time with
// support queries.
Polytope planar_image(const Polytope& p, const Eigen::MatrixXd& M) {
  auto image_point = [&](const Eigen::Vector2d& d) -> Eigen::Vector2d {
    return M * p.support_point(M.transpose() * d);
  };
  std::vector<Eigen::Vector2d> hull;
  for (const Eigen::Vector2d& d : {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1),
                                  Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, -1)}) {
    hull.push_back(image_point(d));
  }
  double diameter = 0.0;
  for (const auto& a : hull) {
    for (const auto& b : hull) diameter = std::max(diameter, (a - b).norm());
  }
  if (diameter <= 0.0) throw SetError("linear_map: image is a single point");
  const double tol = 1e-10 * diameter;

  auto dedupe = [&](std::vector<Eigen::Vector2d>& pts) {
    std::vector<Eigen::Vector2d> out;
    for (const auto& q : pts) {
      if (out.empty() || (out.back() - q).norm() > tol) out.push_back(q);
    }
    while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
    pts = std::move(out);
  };
  dedupe(hull);
  if (hull.size() < 3) throw SetError("linear_map: image is not full-dimensional");

  for (int iter = 0; iter < 10000; ++iter) {
    bool inserted = false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Eigen::Vector2d& a = hull[i];
      const Eigen::Vector2d& b = hull[(i + 1) % hull.size()];
      const Eigen::Vector2d edge = b - a;
      Eigen::Vector2d normal(edge.y(), -edge.x());
      if (normal.norm() <= tol) continue;
      normal.normalize();
      const Eigen::Vector2d q = image_point(normal);
      if (normal.dot(q) > normal.dot(a) + tol) {
        hull.insert(hull.begin() + static_cast<long>(i) + 1, q);
        inserted = true;
        break;
      }
    }
    if (!inserted) break;
  }
  dedupe(hull);
  if (hull.size() < 3) throw SetError("linear_map: image is not full-dimensional");

  Eigen::MatrixXd A(hull.size(), 2);
  Eigen::VectorXd b(hull.size());
  int rows = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d edge = hull[(i + 1) % hull.size()] - hull[i];
    Eigen::Vector2d normal(edge.y(), -edge.x());
    if (normal.norm() <= tol) continue;
    normal.normalize();
    A.row(rows) = normal.transpose();
    b(rows) = normal.dot(hull[i]);
    ++rows;
  }
  return Polytope(A.topRows(rows), b.head(rows)).without_redundant_rows();
}

}  // namespace

Polytope minkowski_sum(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw SetError("minkowski_sum: dimension mismatch");
  if (p.is_box() && q.is_box()) {
    const auto& a = *p.axis_bounds();
    const auto& b = *q.axis_bounds();
    return Polytope::box(a.lower + b.lower, a.upper + b.upper);
  }
  return minkowski_sum_generic(p, q);
}

Polytope minkowski_sum_generic(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw SetError("minkowski_sum: dimension mismatch");
  const int n = p.dim();
  const FaceLattice fp = vertices_and_edges(p);
  const FaceLattice fq = vertices_and_edges(q);
  if (fp.vertices.empty() || fq.vertices.empty()) throw SetError("minkowski_sum: empty operand");

  std::vector<Eigen::VectorXd> dirs;
  for (const auto& e : fp.edge_directions) append_unique_direction(dirs, e);
  for (const auto& e : fq.edge_directions) append_unique_direction(dirs, e);
  std::vector<Eigen::VectorXd> normals = hyperplane_normals(dirs, n);
  for (int i = 0; i < p.rows(); ++i) normals.push_back(p.normals().row(i).transpose());
  for (int i = 0; i < q.rows(); ++i) normals.push_back(q.normals().row(i).transpose());

  return from_support(normals,
                      [&](const Eigen::VectorXd& c) {
                        return max_dot(fp.vertices, c) + max_dot(fq.vertices, c);
                      })
      .without_redundant_rows();
}

Polytope pontryagin_diff(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw SetError("pontryagin_diff: dimension mismatch");
  Eigen::VectorXd offsets = p.offsets();
  for (int i = 0; i < p.rows(); ++i) offsets(i) -= q.support(p.normals().row(i).transpose());
  Polytope result(p.normals(), std::move(offsets));
  if (result.is_empty()) {
    throw EmptyTightenedSet("pontryagin_diff: the subtrahend does not fit inside the set");
  }
  return result;
}

Polytope linear_map(const Polytope& p, const Eigen::MatrixXd& m) {
  const int n = p.dim();
  if (m.cols() != n) throw SetError("linear_map: matrix has wrong column count");
  const int k = static_cast<int>(m.rows());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (k > n) throw SetError("linear_map: image is not full-dimensional in the target space");
  if (lu.rank() < k) throw SetError("linear_map: matrix is rank deficient");

  if (k == n) return Polytope(p.normals() * lu.inverse(), p.offsets());
  if (k == 1) {
    const Eigen::VectorXd row = m.row(0).transpose();
    const double hi = p.support(row);
    const double lo = -p.support(-row);
    return Polytope::box(Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi));
  }
  if (k == 2) return planar_image(p, m);

  const FaceLattice lattice = vertices_and_edges(p);
  std::vector<Eigen::VectorXd> dirs;
  for (const auto& e : lattice.edge_directions) append_unique_direction(dirs, m * e);
  std::vector<Eigen::VectorXd> image;
  for (const auto& v : lattice.vertices) image.push_back(m * v);
  return from_support(hyperplane_normals(dirs, k),
                      [&](const Eigen::VectorXd& c) { return max_dot(image, c); })
      .without_redundant_rows();
}

}  // namespace tubeuav::setcalc
