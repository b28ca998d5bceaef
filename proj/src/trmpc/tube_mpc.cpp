#include "tubeuav/trmpc/tube_mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tubeuav::trmpc {

std::string to_string(TubeMode mode) {
  return mode == TubeMode::kConventional ? "conventional" : "literal";
}

TubeMode tube_mode_from_string(const std::string& text) {
  if (text == "conventional") return TubeMode::kConventional;
  if (text == "literal") return TubeMode::kLiteral;
  throw std::invalid_argument("unknown tube mode '" + text + "' (expected literal|conventional)");
}

Equilibrium steady_state(const airframe::LinearModel& model_d, const Setpoint& setpoint) {
  const int n = model_d.num_states();
  const int m = model_d.num_inputs();
  if (setpoint.values.size() != static_cast<int>(setpoint.indices.size())) {
    throw SynthesisError("steady_state: setpoint size mismatch");
  }
  std::vector<char> fixed(n, 0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < setpoint.indices.size(); ++i) {
    const int idx = setpoint.indices[i];
    if (idx < 0 || idx >= n) throw SynthesisError("steady_state: setpoint index out of range");
    fixed[idx] = 1;
    x(idx) = setpoint.values(static_cast<int>(i));
  }
  std::vector<int> free;
  for (int i = 0; i < n; ++i) {
    if (!fixed[i]) free.push_back(i);
  }
  const Eigen::MatrixXd a_minus_i = model_d.A - Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd lhs(n, static_cast<int>(free.size()) + m);
  for (std::size_t j = 0; j < free.size(); ++j) lhs.col(static_cast<int>(j)) = a_minus_i.col(free[j]);
  lhs.rightCols(m) = model_d.B;
  const Eigen::VectorXd rhs = -a_minus_i * x;
  const Eigen::VectorXd sol = lhs.completeOrthogonalDecomposition().solve(rhs);
  const double residual = (lhs * sol - rhs).norm();
  if (residual > 1e-9 * (1.0 + rhs.norm())) {
    throw SynthesisError("steady_state: setpoint is not an equilibrium of the model");
  }
  Equilibrium eq;
  eq.x = x;
  for (std::size_t j = 0; j < free.size(); ++j) eq.x(free[j]) = sol(static_cast<int>(j));
  eq.v = sol.tail(m);
  return eq;
}

TubeMpc::TubeMpc(std::shared_ptr<const TubeSynthesis> synthesis, TubeMode mode)
    : syn_(std::move(synthesis)), mode_(mode) {
  if (!syn_) throw std::invalid_argument("TubeMpc: null synthesis");
  const auto& a = syn_->model_d.A;
  const auto& b = syn_->model_d.B;
  n_ = static_cast<int>(a.rows());
  m_ = static_cast<int>(b.cols());
  N_ = syn_->weights.N;

  phi_.resize(N_ * n_, n_);
  gamma_ = Eigen::MatrixXd::Zero(N_ * n_, N_ * m_);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n_, n_);
  std::vector<Eigen::MatrixXd> a_pow{power};
  for (int i = 1; i <= N_; ++i) {
    power = a * power;
    a_pow.push_back(power);
    phi_.middleRows((i - 1) * n_, n_) = power;
  }
  for (int i = 1; i <= N_; ++i) {
    for (int j = 0; j < i; ++j) {
      gamma_.block((i - 1) * n_, j * m_, n_, m_) = a_pow[i - 1 - j] * b;
    }
  }
  qbar_ = Eigen::MatrixXd::Zero(N_ * n_, N_ * n_);
  for (int i = 0; i < N_ - 1; ++i) qbar_.block(i * n_, i * n_, n_, n_) = syn_->weights.Q;
  qbar_.bottomRightCorner(n_, n_) = syn_->P;
  rbar_ = Eigen::MatrixXd::Zero(N_ * m_, N_ * m_);
  for (int i = 0; i < N_; ++i) rbar_.block(i * m_, i * m_, m_, m_) = syn_->weights.R;

  const auto& V = syn_->V;
  const auto& Z = syn_->Z;
  const auto& Zf = syn_->Zf;
  input_rows_ = N_ * V.rows();
  state_rows_ = (N_ - 1) * Z.rows();
  terminal_rows_ = Zf.rows();
  const int rows = input_rows_ + state_rows_ + terminal_rows_;
  c_ = Eigen::MatrixXd::Zero(rows, N_ * m_);
  c_state_ = Eigen::MatrixXd::Zero(rows, n_);
  d_const_ = Eigen::VectorXd::Zero(rows);
  int r = 0;
  for (int i = 0; i < N_; ++i, r += V.rows()) {
    c_.block(r, i * m_, V.rows(), m_) = V.normals();
  }
  for (int i = 1; i < N_; ++i, r += Z.rows()) {
    c_.block(r, 0, Z.rows(), N_ * m_) = Z.normals() * gamma_.middleRows((i - 1) * n_, n_);
    c_state_.middleRows(r, Z.rows()) = Z.normals() * phi_.middleRows((i - 1) * n_, n_);
  }
  c_.block(r, 0, Zf.rows(), N_ * m_) = Zf.normals() * gamma_.bottomRows(n_);
  c_state_.middleRows(r, Zf.rows()) = Zf.normals() * phi_.bottomRows(n_);

  // Rows that do not depend on ṽ are checked directly instead of entering the QP.
  for (int i = 0; i < rows; ++i) {
    if (c_.row(i).norm() > 1e-12 * (1.0 + c_.cwiseAbs().maxCoeff())) qp_rows_.push_back(i);
    else constant_rows_.push_back(i);
  }
  Eigen::MatrixXd c_qp(qp_rows_.size(), N_ * m_);
  for (std::size_t i = 0; i < qp_rows_.size(); ++i) c_qp.row(i) = c_.row(qp_rows_[i]);
  const Eigen::MatrixXd h = 2.0 * (gamma_.transpose() * qbar_ * gamma_ + rbar_);
  qp_ = DenseQp(h, c_qp);
  state_.z = Eigen::VectorXd::Zero(n_);
  state_.last_v = Eigen::VectorXd::Zero(m_);
}

void TubeMpc::reset() {
  state_ = ControllerState{};
  state_.z = Eigen::VectorXd::Zero(n_);
  state_.last_v = Eigen::VectorXd::Zero(m_);
}

const Equilibrium& TubeMpc::equilibrium_for(const Setpoint& setpoint) {
  if (!cached_setpoint_ || cached_setpoint_->indices != setpoint.indices ||
      cached_setpoint_->values != setpoint.values) {
    cached_eq_ = steady_state(syn_->model_d, setpoint);
    cached_scale_ = terminal_scale(cached_eq_);
    cached_setpoint_ = setpoint;
  }
  return cached_eq_;
}

// Largest λ ≤ 1 with z_ref + λ Zf ⊆ Z and K(λ Zf) ⊆ V − v_ref.
double TubeMpc::terminal_scale(const Equilibrium& eq) const {
  const auto& Zf = syn_->Zf;
  double lambda = 1.0;
  auto limit = [&](const Eigen::VectorXd& normal, double offset) {
    const double room = offset - normal.dot(eq.x);
    const double need = Zf.support(normal);
    if (need > 1e-14) lambda = std::min(lambda, room / need);
    else if (room < 0) lambda = 0.0;
  };
  for (int i = 0; i < syn_->Z.rows(); ++i) {
    limit(syn_->Z.normals().row(i).transpose(), syn_->Z.offsets()(i));
  }
  for (int i = 0; i < syn_->V.rows(); ++i) {
    const Eigen::VectorXd g = syn_->V.normals().row(i).transpose();
    const double room = syn_->V.offsets()(i) - g.dot(eq.v);
    const double need = Zf.support(syn_->K.transpose() * g);
    if (need > 1e-14) lambda = std::min(lambda, room / need);
    else if (room < 0) lambda = 0.0;
  }
  return std::clamp(lambda, 0.0, 1.0);
}

TubeMpc::Problem TubeMpc::build_problem(const Eigen::VectorXd& z, const Setpoint& setpoint) {
  Problem prob;
  prob.eq = equilibrium_for(setpoint);
  prob.terminal_scale = cached_scale_;
  const Eigen::VectorXd z0 = z - prob.eq.x;
  prob.f = 2.0 * gamma_.transpose() * qbar_ * phi_ * z0;

  const auto& V = syn_->V;
  const auto& Z = syn_->Z;
  const auto& Zf = syn_->Zf;
  prob.d.resize(c_.rows());
  int r = 0;
  const Eigen::VectorXd dv = V.offsets() - V.normals() * prob.eq.v;
  for (int i = 0; i < N_; ++i, r += V.rows()) prob.d.segment(r, V.rows()) = dv;
  const Eigen::VectorXd dz = Z.offsets() - Z.normals() * prob.eq.x;
  for (int i = 1; i < N_; ++i, r += Z.rows()) prob.d.segment(r, Z.rows()) = dz;
  prob.d.segment(r, Zf.rows()) = prob.terminal_scale * Zf.offsets();
  prob.d -= c_state_ * z0;
  return prob;
}

double TubeMpc::horizon_cost(const Eigen::VectorXd& z0_dev, const Eigen::VectorXd& v_dev) const {
  const Eigen::VectorXd traj = phi_ * z0_dev + gamma_ * v_dev;
  return z0_dev.dot(syn_->weights.Q * z0_dev) + traj.dot(qbar_ * traj) + v_dev.dot(rbar_ * v_dev);
}

std::string TubeMpc::family_of_row(int row) const {
  if (row < 0) return "unknown";
  if (row < input_rows_) return "input";
  if (row < input_rows_ + state_rows_) return "state";
  return "terminal";
}

MpcOutput TubeMpc::step(const Eigen::VectorXd& x, const Setpoint& setpoint,
                        bool throw_on_infeasible) {
  if (x.size() != n_ || !x.allFinite()) throw std::invalid_argument("TubeMpc::step: bad state");
  if (!state_.initialized || mode_ == TubeMode::kLiteral) {
    state_.z = x;
    if (!state_.initialized) state_.plan.clear();
    state_.initialized = true;
  }
  MpcOutput out;
  out.z = state_.z;

  const auto start = std::chrono::steady_clock::now();
  const Problem prob = build_problem(state_.z, setpoint);
  Eigen::VectorXd d_qp(qp_rows_.size());
  for (std::size_t i = 0; i < qp_rows_.size(); ++i) d_qp(i) = prob.d(qp_rows_[i]);
  last_solution_ = qp_.solve(prob.f, d_qp);
  if (last_solution_.status == QpStatus::kInfeasible && last_solution_.blocking_row >= 0) {
    last_solution_.blocking_row = qp_rows_[last_solution_.blocking_row];
  }
  for (int row : constant_rows_) {
    if (prob.d(row) < -1e-12) {
      last_solution_.status = QpStatus::kInfeasible;
      last_solution_.blocking_row = row;
    }
  }
  out.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.qp_iterations = last_solution_.iterations;

  if (last_solution_.status == QpStatus::kOptimal) {
    const Eigen::VectorXd& sol = last_solution_.x;
    state_.plan.clear();
    for (int i = 0; i < N_; ++i) state_.plan.push_back(sol.segment(i * m_, m_) + prob.eq.v);
    out.cost = horizon_cost(state_.z - prob.eq.x, sol);
  } else {
    out.feasible = false;
    out.infeasible_family = last_solution_.status == QpStatus::kInfeasible
                                ? family_of_row(last_solution_.blocking_row)
                                : "solver";
    if (throw_on_infeasible) {
      throw InfeasibleError("TubeMpc::step: nominal problem infeasible (" +
                                out.infeasible_family + " constraints)",
                            out.infeasible_family);
    }
    // Shift the last feasible plan; past its end use the terminal law.
    if (!state_.plan.empty()) state_.plan.erase(state_.plan.begin());
    if (state_.plan.empty()) {
      state_.plan.push_back(prob.eq.v + syn_->K * (state_.z - prob.eq.x));
    }
  }
  out.v = state_.plan.front();
  out.u = out.v + syn_->K * (x - state_.z);
  out.z_next = syn_->model_d.A * state_.z + syn_->model_d.B * out.v;
  state_.last_v = out.v;
  state_.z = out.z_next;
  return out;
}

}  // namespace tubeuav::trmpc
