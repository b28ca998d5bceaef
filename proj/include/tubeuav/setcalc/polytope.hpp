#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tubeuav::setcalc {

class SetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constraint set vanished after Pontryagin tightening.
class EmptyTightenedSet : public SetError {
 public:
  using SetError::SetError;
};

/// An iterative set computation hit its iteration cap.
class NonConvergent : public SetError {
 public:
  using SetError::SetError;
};

/// Axis-aligned bounds of a box-shaped polytope.
struct AxisBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/**
 * Convex polytope in halfspace representation, { x : aᵢᵀx ≤ bᵢ }.
 *
 * Rows are stored with unit-norm normals. Construction rejects zero normals;
 * boundedness and non-emptiness are checked lazily by the operations that
 * depend on them (support, vertex enumeration).
 */
class Polytope {
 public:
  Polytope() = default;
  Polytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets);

  /// Symmetric box { x : |xᵢ| ≤ hᵢ }. Zero half-widths give a flat set.
  static Polytope box(const Eigen::VectorXd& half_widths);
  static Polytope box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);
  /// The singleton {0} in `dim` dimensions.
  static Polytope origin(int dim);

  int dim() const { return static_cast<int>(normals_.cols()); }
  int rows() const { return static_cast<int>(normals_.rows()); }
  const Eigen::MatrixXd& normals() const { return normals_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
  /// Largest row violation aᵢᵀx − bᵢ (≤ 0 inside).
  double max_violation(const Eigen::VectorXd& x) const;

  /// h(d) = max { dᵀx : x ∈ P }.
  double support(const Eigen::VectorXd& d) const;
  /// A maximizer of dᵀx over the set.
  Eigen::VectorXd support_point(const Eigen::VectorXd& d) const;

  /// Set when every row is ±eᵢ and every axis is bounded on both sides.
  const std::optional<AxisBounds>& axis_bounds() const { return bounds_; }
  bool is_box() const { return bounds_.has_value(); }

  bool is_empty(double tol = 1e-10) const;
  Eigen::VectorXd chebyshev_center() const;

  Polytope scaled(double factor) const;
  Polytope translated(const Eigen::VectorXd& shift) const;
  Polytope intersect(const Polytope& other) const;
  /// Drops duplicate rows and rows implied by the others (one LP per row).
  Polytope without_redundant_rows(double tol = 1e-9) const;

  /// Vertex enumeration by active-set combinations; intended for small sets.
  std::vector<Eigen::VectorXd> vertices(double tol = 1e-9) const;

 private:
  void detect_box();

  Eigen::MatrixXd normals_;
  Eigen::VectorXd offsets_;
  std::optional<AxisBounds> bounds_;
};

/// Lossless symmetric box description of a disturbance set.
struct BoxSet {
  Eigen::VectorXd half_widths;

  Polytope polytope() const { return Polytope::box(half_widths); }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

/// Vertices and edge directions of a small polytope.
struct FaceLattice {
  std::vector<Eigen::VectorXd> vertices;
  std::vector<Eigen::VectorXd> edge_directions;
};
FaceLattice vertices_and_edges(const Polytope& p, double tol = 1e-9);

double support(const Polytope& p, const Eigen::VectorXd& d);
Polytope minkowski_sum(const Polytope& p, const Polytope& q);
/// Minkowski sum through vertex/edge enumeration, without the box fast path.
Polytope minkowski_sum_generic(const Polytope& p, const Polytope& q);
Polytope pontryagin_diff(const Polytope& p, const Polytope& q);
Polytope linear_map(const Polytope& p, const Eigen::MatrixXd& m);

/// Builds { x : cᵀx ≤ h(c) } over the candidate normals, where h is a support
/// oracle. Exact whenever the candidates include every facet normal.
template <typename SupportFn>
Polytope from_support(const std::vector<Eigen::VectorXd>& normals, SupportFn&& h) {
  const int n = normals.empty() ? 0 : static_cast<int>(normals.front().size());
  Eigen::MatrixXd A(normals.size(), n);
  Eigen::VectorXd b(normals.size());
  for (std::size_t i = 0; i < normals.size(); ++i) {
    A.row(i) = normals[i].transpose();
    b(i) = h(normals[i]);
  }
  return Polytope(std::move(A), std::move(b));
}

/// Every normal to an (n−1)-subset of `directions` spanning a hyperplane,
/// both signs, deduplicated. Throws SetError when more than `limit`
/// subsets would have to be examined.
std::vector<Eigen::VectorXd> hyperplane_normals(const std::vector<Eigen::VectorXd>& directions,
                                                int dim, std::size_t limit = 500000);

/// The fixed set of 64 unit directions used for approximate set metrics.
const std::vector<Eigen::VectorXd>& metric_directions(int dim);

/// Hausdorff distance estimated as max |h_P(d) − h_Q(d)| over metric_directions.
double hausdorff_distance(const Polytope& p, const Polytope& q);

/// True when h_inner(d) ≤ h_outer(d) + tol on every row normal of `outer`
/// (exact set inclusion for H-represented outer sets).
bool is_subset(const Polytope& inner, const Polytope& outer, double tol = 1e-9);

}  // namespace tubeuav::setcalc
