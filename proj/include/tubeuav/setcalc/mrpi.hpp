#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tubeuav/setcalc/polytope.hpp"

namespace tubeuav::setcalc {

double spectral_radius(const Eigen::MatrixXd& m);

struct MrpiOptions {
  /// Cap on the number of Minkowski terms s.
  int max_terms = 200;
  /// Directions always present in the returned H-rep with exact offsets.
  std::vector<Eigen::VectorXd> extra_directions;
  /// Above this many candidate facet normals the H-rep falls back to a
  /// template (axes, rows of W, extra and metric directions).
  std::size_t exact_normal_limit = 20000;
};

struct MrpiResult {
  Polytope set;
  int terms = 0;
  double alpha = 0.0;
  /// True when the H-rep is exactly (1 − α)⁻¹ ⊕ Aⁱ W; otherwise it is an
  /// outer template bound that is exact in its own row directions.
  bool exact = false;
};

/**
 * Outer ε-approximation of the minimal robust positively invariant set of
 * x⁺ = A_K x + w, w ∈ W.
 *
 * Searches the smallest s with A_Kˢ W ⊆ α W and α ≤ ε / (ε + r), where r is
 * the ∞-norm radius of F_s = ⊕_{i<s} A_Kⁱ W, and returns (1 − α)⁻¹ F_s. The
 * result satisfies F_∞ ⊆ S ⊆ F_∞ ⊕ B_∞(ε) when exact.
 */
MrpiResult mrpi_approx(const Eigen::MatrixXd& a_k, const Polytope& w, double eps,
                       const MrpiOptions& options = {});

}  // namespace tubeuav::setcalc
