#include "tubeuav/airframe/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

namespace tubeuav::airframe {
namespace {

constexpr double kDegToRad = M_PI / 180.0;

struct Scaled {
  double V, m, Jx, Jy, Jz, Jxz, qbar, S, b, c;
};

Scaled scaled_parameters(const TrimCondition& trim, const AeroDerivativeTable& aero,
                         const Perturbation& p) {
  Scaled s;
  s.V = trim.airspeed * (1.0 + p.airspeed);
  s.m = aero.at("mass") * (1.0 + p.mass);
  s.Jx = aero.at("Jx") * (1.0 + p.inertia);
  s.Jy = aero.at("Jy") * (1.0 + p.inertia);
  s.Jz = aero.at("Jz") * (1.0 + p.inertia);
  s.Jxz = aero.at("Jxz") * (1.0 + p.inertia);
  s.S = aero.at("wing_area");
  s.b = aero.at("wing_span");
  s.c = aero.at("mean_chord");
  s.qbar = 0.5 * aero.at("air_density") * s.V * s.V;
  return s;
}

LinearModel build_longitudinal(const TrimCondition& trim, const AeroDerivativeTable& aero,
                               const Perturbation& p) {
  const Scaled s = scaled_parameters(trim, aero, p);
  const double gamma0 = trim.gamma_deg * kDegToRad;
  const double CL = s.m * kGravity * std::cos(gamma0) / (s.qbar * s.S);
  const double k = aero.at("CD_k");
  const double CD = aero.at("CD0") + k * CL * CL;
  const double CLa = aero.at("CL_alpha");
  const double qS = s.qbar * s.S;

  const double Xu = -2.0 * qS * CD / (s.m * s.V);
  const double Xa = qS * (CL - 2.0 * k * CL * CLa) / s.m;
  const double XdT = aero.at("thrust_per_throttle") / s.m;
  const double Zu = -2.0 * qS * CL / (s.m * s.V);
  const double Za = -qS * (CLa + CD) / s.m;
  const double Zq = -qS * s.c * aero.at("CL_q") / (2.0 * s.V * s.m);
  const double Zde = -qS * aero.at("CL_de") / s.m;
  const double Ma = qS * s.c * aero.at("Cm_alpha") / s.Jy;
  const double Mq = qS * s.c * s.c * aero.at("Cm_q") / (2.0 * s.V * s.Jy);
  const double Mde = qS * s.c * aero.at("Cm_de") / s.Jy;

  const double gc = kGravity * std::cos(gamma0);
  const double gs = kGravity * std::sin(gamma0) / s.V;
  LinearModel m;
  m.A = Eigen::MatrixXd::Zero(5, 5);
  m.B = Eigen::MatrixXd::Zero(5, 2);
  // u
  m.A.row(0) << Xu, Xa + gc, -gc, 0, 0;
  m.B(0, 0) = XdT;
  // alpha
  m.A.row(1) << Zu / s.V, Za / s.V + gs, -gs, 1.0 + Zq / s.V, 0;
  m.B(1, 1) = Zde / s.V;
  // theta
  m.A(2, 3) = 1.0;
  // q
  m.A.row(3) << 0, Ma, 0, Mq, 0;
  m.B(3, 1) = Mde;
  // h
  m.A.row(4) << std::sin(gamma0), -s.V * std::cos(gamma0), s.V * std::cos(gamma0), 0, 0;

  m.C = Eigen::MatrixXd::Identity(5, 5);
  m.state_names = {"u", "alpha", "theta", "q", "h"};
  m.input_names = {"throttle", "elevator"};
  m.provenance = ModelProvenance{Axis::kLongitudinal, trim, aero, p};
  return m;
}

LinearModel build_lateral(const TrimCondition& trim, const AeroDerivativeTable& aero,
                          const Perturbation& p) {
  const Scaled s = scaled_parameters(trim, aero, p);
  const double alpha0 = trim.alpha_deg * kDegToRad;
  const double theta0 = trim.theta_deg * kDegToRad;
  const double qS = s.qbar * s.S;
  const double U0 = s.V * std::cos(alpha0);
  const double W0 = s.V * std::sin(alpha0);

  const double Yv = qS * aero.at("CY_beta") / (s.m * s.V);
  const double Yp = qS * s.b * aero.at("CY_p") / (2.0 * s.m * s.V);
  const double Yr = qS * s.b * aero.at("CY_r") / (2.0 * s.m * s.V);
  const double Yda = qS * aero.at("CY_da") / s.m;

  auto moment = [&](const char* beta, const char* roll, const char* yaw, const char* da,
                    double J) {
    return Eigen::Vector4d(qS * s.b * aero.at(beta) / (J * s.V),
                           qS * s.b * s.b * aero.at(roll) / (2.0 * J * s.V),
                           qS * s.b * s.b * aero.at(yaw) / (2.0 * J * s.V),
                           qS * s.b * aero.at(da) / J);
  };
  const Eigen::Vector4d L = moment("Cl_beta", "Cl_p", "Cl_r", "Cl_da", s.Jx);
  const Eigen::Vector4d N = moment("Cn_beta", "Cn_p", "Cn_r", "Cn_da", s.Jz);
  // Product-of-inertia coupling folded into primed derivatives.
  const double gamma = 1.0 - s.Jxz * s.Jxz / (s.Jx * s.Jz);
  const Eigen::Vector4d Lp = (L + (s.Jxz / s.Jx) * N) / gamma;
  const Eigen::Vector4d Np = (N + (s.Jxz / s.Jz) * L) / gamma;

  LinearModel m;
  m.A = Eigen::MatrixXd::Zero(4, 4);
  m.B = Eigen::MatrixXd::Zero(4, 1);
  m.A.row(0) << Yv, Yp + W0, Yr - U0, kGravity * std::cos(theta0);
  m.A.row(1) << Lp(0), Lp(1), Lp(2), 0;
  m.A.row(2) << Np(0), Np(1), Np(2), 0;
  m.A.row(3) << 0, 1.0, std::tan(theta0), 0;
  m.B << Yda, Lp(3), Np(3), 0;

  m.C = Eigen::MatrixXd::Identity(4, 4);
  m.state_names = {"v", "p", "r", "phi"};
  m.input_names = {"aileron"};
  m.provenance = ModelProvenance{Axis::kLateral, trim, aero, p};
  return m;
}

}  // namespace

void TrimCondition::validate() const {
  if (!(airspeed > 0.0)) throw std::invalid_argument("trim airspeed must be positive");
  if (!std::isfinite(altitude) || !std::isfinite(alpha_deg) || !std::isfinite(theta_deg) ||
      !std::isfinite(gamma_deg)) {
    throw std::invalid_argument("trim values must be finite");
  }
}

void UncertaintySpec::validate() const {
  for (double f : {airspeed, mass, inertia}) {
    if (!(f >= 0.0 && f < 0.5)) throw std::invalid_argument("uncertainty fractions must be in [0, 0.5)");
  }
}

int LinearModel::state_index(const std::string& name) const {
  const auto it = std::find(state_names.begin(), state_names.end(), name);
  if (it == state_names.end()) throw std::out_of_range("unknown state '" + name + "'");
  return static_cast<int>(it - state_names.begin());
}

int LinearModel::input_index(const std::string& name) const {
  const auto it = std::find(input_names.begin(), input_names.end(), name);
  if (it == input_names.end()) throw std::out_of_range("unknown input '" + name + "'");
  return static_cast<int>(it - input_names.begin());
}

AirframeModels build_mh850_models(const TrimCondition& trim, const AeroDerivativeTable& aero,
                                  const Perturbation& perturbation) {
  trim.validate();
  aero.check_complete();
  return {build_longitudinal(trim, aero, perturbation), build_lateral(trim, aero, perturbation)};
}

LinearModel discretize(const LinearModel& model, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("discretize: dt must be positive");
  if (model.is_discrete()) throw std::invalid_argument("discretize: model is already discrete");
  const int n = model.num_states();
  const int m = model.num_inputs();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = model.A * dt;
  aug.topRightCorner(n, m) = model.B * dt;
  const Eigen::MatrixXd phi = aug.exp();
  LinearModel out = model;
  out.A = phi.topLeftCorner(n, n);
  out.B = phi.topRightCorner(n, m);
  out.dt = dt;
  return out;
}

LinearModel perturb(const LinearModel& model, const Perturbation& delta) {
  if (!model.provenance) throw std::invalid_argument("perturb: model has no provenance");
  const auto& prov = *model.provenance;
  LinearModel rebuilt = prov.axis == Axis::kLongitudinal
                            ? build_longitudinal(prov.trim, prov.aero, delta)
                            : build_lateral(prov.trim, prov.aero, delta);
  return model.is_discrete() ? discretize(rebuilt, model.dt) : rebuilt;
}

std::vector<Perturbation> vertex_perturbations(const UncertaintySpec& spec) {
  spec.validate();
  std::vector<Perturbation> corners{Perturbation{}};
  const double bounds[3] = {spec.airspeed, spec.mass, spec.inertia};
  for (int axis = 0; axis < 3; ++axis) {
    if (bounds[axis] == 0.0) continue;
    std::vector<Perturbation> next;
    for (const auto& c : corners) {
      for (double sign : {-1.0, 1.0}) {
        Perturbation q = c;
        double* slot = axis == 0 ? &q.airspeed : axis == 1 ? &q.mass : &q.inertia;
        *slot = sign * bounds[axis];
        next.push_back(q);
      }
    }
    corners = std::move(next);
  }
  return corners;
}

std::vector<LinearModel> perturb_vertices(const LinearModel& model, const UncertaintySpec& spec) {
  std::vector<LinearModel> out;
  for (const auto& p : vertex_perturbations(spec)) out.push_back(perturb(model, p));
  return out;
}

Perturbation random_perturbation(const UncertaintySpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Perturbation p;
  p.airspeed = spec.airspeed * unit(rng);
  p.mass = spec.mass * unit(rng);
  p.inertia = spec.inertia * unit(rng);
  return p;
}

int controllability_rank(const LinearModel& model) {
  const int n = model.num_states();
  const int m = model.num_inputs();
  Eigen::MatrixXd ctrb(n, n * m);
  Eigen::MatrixXd block = model.B;
  for (int i = 0; i < n; ++i) {
    ctrb.middleCols(i * m, m) = block;
    block = model.A * block;
  }
  // Column scaling keeps the rank test meaningful for poorly scaled models.
  for (int j = 0; j < ctrb.cols(); ++j) {
    const double norm = ctrb.col(j).norm();
    if (norm > 0) ctrb.col(j) /= norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctrb);
  return static_cast<int>((svd.singularValues().array() > 1e-10).count());
}

}  // namespace tubeuav::airframe
