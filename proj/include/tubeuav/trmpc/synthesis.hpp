#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tubeuav/airframe/models.hpp"
#include "tubeuav/setcalc/polytope.hpp"
#include "tubeuav/trmpc/gain.hpp"

namespace tubeuav::trmpc {

struct TubeWeights {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  int N = 15;

  void validate(int states, int inputs) const;

  static TubeWeights longitudinal_defaults();
  static TubeWeights lateral_defaults();
};

/// Symmetric state and input limits in deviation-from-trim coordinates
/// (SI units, radians).
struct AxisLimits {
  Eigen::VectorXd state_half_widths;
  Eigen::VectorXd input_half_widths;

  static AxisLimits longitudinal_defaults();
  static AxisLimits lateral_defaults();
};

struct SynthesisOptions {
  double mrpi_eps = 1e-3;
  int mrpi_max_terms = 200;
  int terminal_max_iterations = 100;
};

struct TerminalSet {
  setcalc::Polytope set;
  int iterations = 0;
};

struct TubeSynthesis {
  airframe::LinearModel model_d;
  TubeWeights weights;
  Eigen::MatrixXd K;
  Eigen::MatrixXd P;
  GainMethod gain_method = GainMethod::kLqr;
  std::vector<double> vertex_radii;
  setcalc::Polytope X, U, W;
  setcalc::Polytope S, Z, V, Zf;
  int mrpi_terms = 0;
  double mrpi_alpha = 0.0;
  bool mrpi_exact = false;
  int terminal_iterations = 0;

  Eigen::MatrixXd closed_loop() const { return model_d.A + model_d.B * K; }
};

/// Z = X ⊖ S and V = U ⊖ KS. EmptyTightenedSet names the set that vanished.
std::pair<setcalc::Polytope, setcalc::Polytope> tighten(const setcalc::Polytope& x,
                                                         const setcalc::Polytope& u,
                                                         const setcalc::Polytope& s,
                                                         const Eigen::MatrixXd& k);

/// Maximal admissible invariant set of z⁺ = A_K z inside {z ∈ Z, Kz ∈ V},
/// by accumulating Aₖⁱ-propagated halfspaces until they are all redundant.
TerminalSet terminal_set(const Eigen::MatrixXd& a_k, const setcalc::Polytope& z,
                         const setcalc::Polytope& v, const Eigen::MatrixXd& k,
                         int max_iterations = 100);

/**
 * Offline tube synthesis: robust gain over `vertices` (vertices[0] is the
 * nominal discrete model), terminal cost, mRPI set of the error dynamics for
 * the disturbance set W, tightened sets and terminal set.
 */
TubeSynthesis synthesize_tube(const std::vector<airframe::LinearModel>& vertices,
                              const setcalc::Polytope& x, const setcalc::Polytope& u,
                              const setcalc::Polytope& w, const TubeWeights& weights,
                              const SynthesisOptions& options = {});

/// Box bound on Σⱼ A_fineʲ wⱼ over `ticks` fine steps with |wⱼ| ≤ w_half
/// componentwise: the disturbance one coarse step accumulates.
Eigen::VectorXd accumulated_disturbance_box(const Eigen::MatrixXd& a_fine,
                                            const Eigen::VectorXd& w_half, int ticks);

}  // namespace tubeuav::trmpc
