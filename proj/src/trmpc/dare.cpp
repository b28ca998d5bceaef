#include "tubeuav/trmpc/dare.hpp"

#include <cmath>
#include <string>

#include "tubeuav/setcalc/mrpi.hpp"

namespace tubeuav::trmpc {
namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void check_inputs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                  const Eigen::MatrixXd& r) {
  const auto n = a.rows();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n || r.rows() != b.cols() ||
      r.cols() != b.cols()) {
    throw SynthesisError("dare: inconsistent matrix dimensions");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(r));
  if (llt.info() != Eigen::Success) throw SynthesisError("dare: R is not positive definite");
}

}  // namespace

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const Eigen::MatrixXd& r, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd s = r + b.transpose() * p * b;
  return -s.ldlt().solve(b.transpose() * p * a);
}

double dare_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                     const Eigen::MatrixXd& r, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd s = r + b.transpose() * p * b;
  const Eigen::MatrixXd bpa = b.transpose() * p * a;
  const Eigen::MatrixXd res =
      q + a.transpose() * p * a - bpa.transpose() * s.ldlt().solve(bpa) - p;
  return res.norm() / std::max(1.0, p.norm());
}

Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const int n = static_cast<int>(a.rows());
  // vec(AᵀXA) = (Aᵀ ⊗ Aᵀ) vec(X).
  Eigen::MatrixXd kron(n * n, n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) = a(j, i) * a.transpose();
  }
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n * n, n * n) - kron;
  const Eigen::VectorXd x =
      lhs.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(q.data(), n * n));
  return symmetrize(Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n));
}

Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
  check_inputs(a, b, q, r);
  const int n = static_cast<int>(a.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  // Structured doubling: A_k → 0, H_k → P.
  Eigen::MatrixXd ak = a;
  Eigen::MatrixXd gk = b * symmetrize(r).llt().solve(b.transpose());
  Eigen::MatrixXd hk = symmetrize(q);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const Eigen::MatrixXd w = I + gk * hk;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(w);
    if (!lu.isInvertible()) break;
    const Eigen::MatrixXd w_a = lu.solve(ak);
    const Eigen::MatrixXd w_g = lu.solve(gk);
    const Eigen::MatrixXd h_next = symmetrize(hk + ak.transpose() * hk * w_a);
    gk = symmetrize(gk + ak * w_g * ak.transpose());
    ak = ak * w_a;
    const double change = (h_next - hk).norm();
    hk = h_next;
    if (!hk.allFinite()) break;
    if (change <= 1e-15 * std::max(1.0, hk.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged || !hk.allFinite()) {
    throw SynthesisError("dare: no stabilizing solution (pair not stabilizable?)");
  }

  // Newton refinement: each step solves a Lyapunov equation for the current gain.
  Eigen::MatrixXd p = hk;
  for (int it = 0; it < 8; ++it) {
    const Eigen::MatrixXd k = lqr_gain(a, b, r, p);
    const Eigen::MatrixXd acl = a + b * k;
    if (setcalc::spectral_radius(acl) >= 1.0) break;
    const Eigen::MatrixXd next = solve_discrete_lyapunov(acl, q + k.transpose() * r * k);
    if (dare_residual(a, b, q, r, next) >= dare_residual(a, b, q, r, p)) break;
    p = next;
  }
  const double rho = setcalc::spectral_radius(a + b * lqr_gain(a, b, r, p));
  if (!(rho < 1.0)) {
    throw SynthesisError("dare: closed loop is not Schur stable (spectral radius " +
                         std::to_string(rho) + "); pair is not stabilizable");
  }
  return p;
}

}  // namespace tubeuav::trmpc
