#pragma once

#include <memory>
#include <vector>

#include "tubeuav/airframe/models.hpp"
#include "tubeuav/trmpc/synthesis.hpp"

namespace tubeuav::testing {

// Discrete plant, vertex family and tube synthesis for one axis, set up the
// way the mission does: 0.1 s controller, 0.01 s noise injection.
struct AxisSetup {
  airframe::LinearModel model_d;
  airframe::LinearModel model_fine;
  std::vector<airframe::LinearModel> vertices;
  Eigen::VectorXd w_plant;  // per-plant-tick disturbance half widths
  Eigen::VectorXd w_step;   // accumulated over one controller tick
  trmpc::AxisLimits limits;
  trmpc::TubeWeights weights;
  std::shared_ptr<const trmpc::TubeSynthesis> syn;
};

inline AxisSetup make_axis(airframe::Axis axis) {
  const auto models = airframe::build_mh850_models(airframe::TrimCondition{},
                                                   airframe::AeroDerivativeTable::bundled_mh850());
  const bool lon = axis == airframe::Axis::kLongitudinal;
  const auto& cont = lon ? models.longitudinal : models.lateral;
  AxisSetup s;
  s.model_d = airframe::discretize(cont, 0.1);
  s.model_fine = airframe::discretize(cont, 0.01);
  s.vertices.push_back(s.model_d);
  for (auto& v : airframe::perturb_vertices(s.model_d, airframe::UncertaintySpec{})) {
    s.vertices.push_back(v);
  }
  if (lon) {
    s.w_plant = Eigen::Vector<double, 5>(1e-2, 1e-6, 1e-6, 1e-6, 1e-3);
    s.limits = trmpc::AxisLimits::longitudinal_defaults();
    s.weights = trmpc::TubeWeights::longitudinal_defaults();
  } else {
    s.w_plant = Eigen::Vector4d(1e-2, 1e-6, 1e-6, 1e-6);
    s.limits = trmpc::AxisLimits::lateral_defaults();
    s.weights = trmpc::TubeWeights::lateral_defaults();
  }
  s.w_step = trmpc::accumulated_disturbance_box(s.model_fine.A, s.w_plant, 10);
  s.syn = std::make_shared<trmpc::TubeSynthesis>(trmpc::synthesize_tube(
      s.vertices, setcalc::Polytope::box(s.limits.state_half_widths),
      setcalc::Polytope::box(s.limits.input_half_widths), setcalc::Polytope::box(s.w_step),
      s.weights));
  return s;
}

inline const AxisSetup& longitudinal_setup() {
  static const AxisSetup s = make_axis(airframe::Axis::kLongitudinal);
  return s;
}

inline const AxisSetup& lateral_setup() {
  static const AxisSetup s = make_axis(airframe::Axis::kLateral);
  return s;
}

}  // namespace tubeuav::testing
