#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tubeuav/airframe/aero_table.hpp"

namespace tubeuav::airframe {

inline constexpr double kGravity = 9.81;

struct TrimCondition {
  double airspeed = 13.5;   // m/s
  double altitude = 100.0;  // m
  double alpha_deg = 5.18;
  double theta_deg = 5.18;
  double gamma_deg = 0.0;

  void validate() const;
};

/// Relative parameter deviations (δ_V, δ_m, δ_J) applied when rebuilding.
struct Perturbation {
  double airspeed = 0.0;
  double mass = 0.0;
  double inertia = 0.0;

  bool is_zero() const { return airspeed == 0.0 && mass == 0.0 && inertia == 0.0; }
};

/// Symmetric relative bounds on (V, m, J); each in [0, 0.5).
struct UncertaintySpec {
  double airspeed = 0.10;
  double mass = 0.10;
  double inertia = 0.10;

  void validate() const;
};

enum class Axis { kLongitudinal, kLateral };

/// What a model was built from, so it can be rebuilt with other parameters.
struct ModelProvenance {
  Axis axis = Axis::kLongitudinal;
  TrimCondition trim;
  AeroDerivativeTable aero;
  Perturbation perturbation;
};

struct LinearModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  std::vector<std::string> state_names;
  std::vector<std::string> input_names;
  /// Sample time in seconds; 0 for a continuous-time model.
  double dt = 0.0;
  std::optional<ModelProvenance> provenance;

  int num_states() const { return static_cast<int>(A.rows()); }
  int num_inputs() const { return static_cast<int>(B.cols()); }
  bool is_discrete() const { return dt > 0.0; }
  int state_index(const std::string& name) const;
  int input_index(const std::string& name) const;
};

struct AirframeModels {
  LinearModel longitudinal;  // states [u, alpha, theta, q, h], inputs [throttle, elevator]
  LinearModel lateral;       // states [v, p, r, phi], input [aileron]
};

/**
 * Decoupled small-perturbation models about level trim.
 *
 * Longitudinal altitude is appended as ḣ = V sinγ₀·u + V cosγ₀·(θ − α).
 * Units: m/s, rad, rad/s, m; throttle is a dimensionless deviation, surface
 * deflections are in rad. C is the identity.
 */
AirframeModels build_mh850_models(const TrimCondition& trim, const AeroDerivativeTable& aero,
                                  const Perturbation& perturbation = {});

/// Exact zero-order-hold discretization via the augmented matrix exponential.
LinearModel discretize(const LinearModel& model, double dt);

/// Rebuilds the model with V·(1+δ_V), m·(1+δ_m), J·(1+δ_J), keeping the sample time.
LinearModel perturb(const LinearModel& model, const Perturbation& delta);

/// Sign corners of the uncertainty box over its nonzero bounds (8 for the
/// default spec, the nominal alone when every bound is zero).
std::vector<Perturbation> vertex_perturbations(const UncertaintySpec& spec);
std::vector<LinearModel> perturb_vertices(const LinearModel& model, const UncertaintySpec& spec);

/// Uniform draw inside the uncertainty box.
Perturbation random_perturbation(const UncertaintySpec& spec, std::uint64_t seed);

/// Rank of the controllability matrix [B, AB, ..., Aⁿ⁻¹B].
int controllability_rank(const LinearModel& model);

}  // namespace tubeuav::airframe
