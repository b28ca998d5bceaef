#include "tubeuav/setcalc/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tubeuav/setcalc/lp.hpp"

namespace tubeuav::setcalc {

Polytope::Polytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets)
    : normals_(std::move(normals)), offsets_(std::move(offsets)) {
  if (normals_.rows() != offsets_.size()) {
    throw SetError("Polytope: normals and offsets have different row counts");
  }
  if (normals_.cols() == 0) throw SetError("Polytope: zero-dimensional set");
  for (int i = 0; i < normals_.rows(); ++i) {
    const double norm = normals_.row(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw SetError("Polytope: row " + std::to_string(i) + " has a zero or non-finite normal");
    }
    normals_.row(i) /= norm;
    offsets_(i) /= norm;
  }
  detect_box();
}

Polytope Polytope::box(const Eigen::VectorXd& half_widths) {
  if ((half_widths.array() < 0.0).any()) throw SetError("box: negative half-width");
  return box(-half_widths, half_widths);
}

Polytope Polytope::box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const int n = lower.size();
  if (upper.size() != n) throw SetError("box: bound size mismatch");
  if ((lower.array() > upper.array()).any()) throw SetError("box: lower bound above upper bound");
  Eigen::MatrixXd A(2 * n, n);
  Eigen::VectorXd b(2 * n);
  A << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  b << upper, -lower;
  return Polytope(std::move(A), std::move(b));
}

Polytope Polytope::origin(int dim) { return box(Eigen::VectorXd::Zero(dim)); }

void Polytope::detect_box() {
  const int n = dim();
  const double inf = std::numeric_limits<double>::infinity();
  AxisBounds bounds{Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
  for (int i = 0; i < rows(); ++i) {
    Eigen::Index axis;
    const double peak = normals_.row(i).cwiseAbs().maxCoeff(&axis);
    if (std::abs(peak - 1.0) > 1e-15) return;
    if (normals_(i, axis) > 0) {
      bounds.upper(axis) = std::min(bounds.upper(axis), offsets_(i));
    } else {
      bounds.lower(axis) = std::max(bounds.lower(axis), -offsets_(i));
    }
  }
  if (!bounds.lower.allFinite() || !bounds.upper.allFinite()) return;
  bounds_ = std::move(bounds);
}

bool Polytope::contains(const Eigen::VectorXd& x, double tol) const {
  return max_violation(x) <= tol;
}

double Polytope::max_violation(const Eigen::VectorXd& x) const {
  if (rows() == 0) return -std::numeric_limits<double>::infinity();
  return (normals_ * x - offsets_).maxCoeff();
}

double Polytope::support(const Eigen::VectorXd& d) const {
  if (d.size() != dim()) throw SetError("support: direction has wrong dimension");
  if (bounds_) {
    if ((bounds_->lower.array() > bounds_->upper.array()).any()) {
      throw SetError("support: empty polytope");
    }
    double h = 0.0;
    for (int j = 0; j < dim(); ++j) {
      h += d(j) > 0 ? d(j) * bounds_->upper(j) : d(j) * bounds_->lower(j);
    }
    return h;
  }
  const auto res = maximize_over_halfspaces(normals_, offsets_, d);
  if (res.status == LpStatus::kUnbounded) throw SetError("support: polytope is unbounded");
  if (res.status == LpStatus::kInfeasible) throw SetError("support: empty polytope");
  return res.value;
}

Eigen::VectorXd Polytope::support_point(const Eigen::VectorXd& d) const {
  if (bounds_) {
    Eigen::VectorXd x(dim());
    for (int j = 0; j < dim(); ++j) x(j) = d(j) >= 0 ? bounds_->upper(j) : bounds_->lower(j);
    return x;
  }
  const auto res = maximize_over_halfspaces(normals_, offsets_, d);
  if (res.status != LpStatus::kOptimal) throw SetError("support_point: empty or unbounded");
  return res.argmax;
}

bool Polytope::is_empty(double tol) const {
  if (bounds_) return (bounds_->lower.array() > bounds_->upper.array() + tol).any();
  if (rows() == 0) return false;
  const double scale = 1.0 + offsets_.cwiseAbs().maxCoeff();
  return chebyshev_ball(normals_, offsets_).radius < -tol * scale;
}

Eigen::VectorXd Polytope::chebyshev_center() const {
  if (bounds_) return 0.5 * (bounds_->lower + bounds_->upper);
  const double cap = 1.0 + offsets_.cwiseAbs().maxCoeff();
  const auto ball = chebyshev_ball(normals_, offsets_, cap);
  if (!std::isfinite(ball.radius) || ball.radius < 0) throw SetError("chebyshev_center: empty set");
  return ball.center;
}

Polytope Polytope::scaled(double factor) const {
  if (!(factor >= 0.0)) throw SetError("scaled: negative factor");
  return Polytope(normals_, offsets_ * factor);
}

Polytope Polytope::translated(const Eigen::VectorXd& shift) const {
  return Polytope(normals_, offsets_ + normals_ * shift);
}

Polytope Polytope::intersect(const Polytope& other) const {
  if (other.dim() != dim()) throw SetError("intersect: dimension mismatch");
  Eigen::MatrixXd A(rows() + other.rows(), dim());
  Eigen::VectorXd b(rows() + other.rows());
  A << normals_, other.normals_;
  b << offsets_, other.offsets_;
  return Polytope(std::move(A), std::move(b));
}

Polytope Polytope::without_redundant_rows(double tol) const {
  const int m = rows();
  // Duplicate or parallel rows: keep the tightest.
  std::vector<int> keep;
  keep.reserve(m);
  for (int i = 0; i < m; ++i) {
    bool merged = false;
    for (int& k : keep) {
      if ((normals_.row(i) - normals_.row(k)).cwiseAbs().maxCoeff() < 1e-12) {
        if (offsets_(i) < offsets_(k)) k = i;
        merged = true;
        break;
      }
    }
    if (!merged) keep.push_back(i);
  }

  std::vector<bool> active(keep.size(), true);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    // Maximize row r over the remaining rows, with row r relaxed to stay bounded.
    std::vector<int> idx;
    for (std::size_t s = 0; s < keep.size(); ++s) {
      if (active[s]) idx.push_back(keep[s]);
    }
    Eigen::MatrixXd A(idx.size(), dim());
    Eigen::VectorXd b(idx.size());
    for (std::size_t s = 0; s < idx.size(); ++s) {
      A.row(s) = normals_.row(idx[s]);
      b(s) = offsets_(idx[s]) + (idx[s] == keep[r] ? 1.0 + std::abs(offsets_(idx[s])) : 0.0);
    }
    const auto res = maximize_over_halfspaces(A, b, normals_.row(keep[r]).transpose());
    if (res.status == LpStatus::kInfeasible) throw SetError("without_redundant_rows: empty set");
    if (res.status == LpStatus::kOptimal &&
        res.value <= offsets_(keep[r]) + tol * (1.0 + std::abs(offsets_(keep[r])))) {
      active[r] = false;
    }
  }

  std::vector<int> final_rows;
  for (std::size_t s = 0; s < keep.size(); ++s) {
    if (active[s]) final_rows.push_back(keep[s]);
  }
  std::sort(final_rows.begin(), final_rows.end());
  Eigen::MatrixXd A(final_rows.size(), dim());
  Eigen::VectorXd b(final_rows.size());
  for (std::size_t s = 0; s < final_rows.size(); ++s) {
    A.row(s) = normals_.row(final_rows[s]);
    b(s) = offsets_(final_rows[s]);
  }
  return Polytope(std::move(A), std::move(b));
}

namespace {

// Calls fn(indices) for every k-subset of {0..m-1} in lexicographic order.
template <typename Fn>
void for_each_combination(int m, int k, Fn&& fn) {
  if (k > m || k <= 0) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double binomial(int m, int k) {
  if (k < 0 || k > m) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
  return r;
}

struct VertexRecord {
  Eigen::VectorXd point;
  std::vector<int> active;
};

std::vector<VertexRecord> enumerate_vertices(const Polytope& p, double tol) {
  const int n = p.dim();
  const int m = p.rows();
  if (binomial(m, n) > 2.0e6) {
    throw SetError("vertices: too many rows (" + std::to_string(m) + ") for enumeration in " +
                   std::to_string(n) + " dimensions");
  }
  const auto& A = p.normals();
  const auto& b = p.offsets();
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  std::vector<VertexRecord> out;
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd rhs(n);
  for_each_combination(m, n, [&](const std::vector<int>& idx) {
    for (int i = 0; i < n; ++i) {
      M.row(i) = A.row(idx[i]);
      rhs(i) = b(idx[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.rank() < n) return;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (!x.allFinite()) return;
    if ((A * x - b).maxCoeff() > tol * scale) return;
    for (const auto& v : out) {
      if ((v.point - x).cwiseAbs().maxCoeff() <= tol * scale) return;
    }
    VertexRecord rec{x, {}};
    const Eigen::VectorXd slack = b - A * x;
    for (int i = 0; i < m; ++i) {
      if (slack(i) <= tol * scale) rec.active.push_back(i);
    }
    out.push_back(std::move(rec));
  });
  if (out.empty()) {
    // Flat or empty sets may have no vertex found by the generic test when
    // every coordinate is pinned by a pair of opposite rows; try the box path.
    if (p.axis_bounds()) {
      const auto& bb = *p.axis_bounds();
      if ((bb.lower.array() <= bb.upper.array()).all() &&
          (bb.upper - bb.lower).cwiseAbs().maxCoeff() <= tol * scale) {
        out.push_back({0.5 * (bb.lower + bb.upper), {}});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Eigen::VectorXd> Polytope::vertices(double tol) const {
  std::vector<Eigen::VectorXd> pts;
  for (auto& rec : enumerate_vertices(*this, tol)) pts.push_back(std::move(rec.point));
  return pts;
}

FaceLattice vertices_and_edges(const Polytope& p, double tol) {
  const int n = p.dim();
  auto recs = enumerate_vertices(p, tol);
  FaceLattice lattice;
  for (const auto& r : recs) lattice.vertices.push_back(r.point);
  const double scale = 1.0 + p.offsets().cwiseAbs().maxCoeff();
  Eigen::MatrixXd common;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    for (std::size_t j = i + 1; j < recs.size(); ++j) {
      std::vector<int> shared;
      std::set_intersection(recs[i].active.begin(), recs[i].active.end(), recs[j].active.begin(),
                            recs[j].active.end(), std::back_inserter(shared));
      if (static_cast<int>(shared.size()) < n - 1) continue;
      common.resize(shared.size(), n);
      for (std::size_t s = 0; s < shared.size(); ++s) common.row(s) = p.normals().row(shared[s]);
      if (n > 1 && Eigen::FullPivLU<Eigen::MatrixXd>(common).rank() != n - 1) continue;
      Eigen::VectorXd dir = recs[j].point - recs[i].point;
      if (dir.norm() <= tol * scale) continue;
      dir.normalize();
      bool parallel = false;
      for (const auto& e : lattice.edge_directions) {
        if (std::abs(std::abs(e.dot(dir)) - 1.0) < 1e-12) {
          parallel = true;
          break;
        }
      }
      if (!parallel) lattice.edge_directions.push_back(dir);
    }
  }
  return lattice;
}

bool BoxSet::contains(const Eigen::VectorXd& x, double tol) const {
  return x.size() == half_widths.size() &&
         (x.cwiseAbs().array() <= half_widths.array() + tol).all();
}

std::vector<Eigen::VectorXd> hyperplane_normals(const std::vector<Eigen::VectorXd>& directions,
                                                int dim, std::size_t limit) {
  std::vector<Eigen::VectorXd> normals;
  auto add = [&](Eigen::VectorXd c) {
    c.normalize();
    for (const auto& e : normals) {
      if ((e - c).cwiseAbs().maxCoeff() < 1e-12) return;
    }
    normals.push_back(c);
    normals.push_back(-c);
  };
  if (dim == 1) {
    normals.push_back(Eigen::VectorXd::Constant(1, 1.0));
    normals.push_back(Eigen::VectorXd::Constant(1, -1.0));
    return normals;
  }
  const int k = dim - 1;
  if (binomial(static_cast<int>(directions.size()), k) > static_cast<double>(limit)) {
    throw SetError("hyperplane_normals: " + std::to_string(directions.size()) +
                   " directions exceed the enumeration limit");
  }
  Eigen::MatrixXd span(k, dim);
  for_each_combination(static_cast<int>(directions.size()), k, [&](const std::vector<int>& idx) {
    for (int i = 0; i < k; ++i) span.row(i) = directions[idx[i]].transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(span);
    if (lu.rank() != k) return;
    const Eigen::MatrixXd kernel = lu.kernel();
    if (kernel.cols() != 1) return;
    Eigen::VectorXd c = kernel.col(0);
    // Canonical sign so that ±c deduplicate.
    Eigen::Index lead;
    c.cwiseAbs().maxCoeff(&lead);
    if (c(lead) < 0) c = -c;
    add(c);
  });
  return normals;
}

const std::vector<Eigen::VectorXd>& metric_directions(int dim) {
  static thread_local std::vector<std::vector<Eigen::VectorXd>> cache;
  if (static_cast<int>(cache.size()) <= dim) cache.resize(dim + 1);
  auto& dirs = cache[dim];
  if (dirs.empty()) {
    std::mt19937_64 rng(0x5eed0064ULL + static_cast<unsigned long long>(dim));
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Axis directions first so box-aligned sets are measured exactly.
    for (int j = 0; j < dim && static_cast<int>(dirs.size()) < 64; ++j) {
      dirs.push_back(Eigen::VectorXd::Unit(dim, j));
      dirs.push_back(-Eigen::VectorXd::Unit(dim, j));
    }
    while (dirs.size() < 64) {
      Eigen::VectorXd d(dim);
      for (int j = 0; j < dim; ++j) d(j) = gauss(rng);
      if (d.norm() < 1e-6) continue;
      dirs.push_back(d.normalized());
    }
  }
  return dirs;
}

double hausdorff_distance(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw SetError("hausdorff_distance: dimension mismatch");
  double worst = 0.0;
  for (const auto& d : metric_directions(p.dim())) {
    worst = std::max(worst, std::abs(p.support(d) - q.support(d)));
  }
  return worst;
}

bool is_subset(const Polytope& inner, const Polytope& outer, double tol) {
  if (inner.dim() != outer.dim()) throw SetError("is_subset: dimension mismatch");
  for (int i = 0; i < outer.rows(); ++i) {
    const double b = outer.offsets()(i);
    if (inner.support(outer.normals().row(i).transpose()) > b + tol * (1.0 + std::abs(b))) {
      return false;
    }
  }
  return true;
}

double support(const Polytope& p, const Eigen::VectorXd& d) {
  if (d.norm() == 0.0) throw SetError("support: zero direction");
  return p.support(d);
}

}  // namespace tubeuav::setcalc
