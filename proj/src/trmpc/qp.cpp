#include "tubeuav/trmpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tubeuav::trmpc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Givens {
  double c = 1.0;
  double s = 0.0;
  double h = 0.0;
};

Givens make_givens(double a, double b) {
  Givens g;
  g.h = std::hypot(a, b);
  if (g.h == 0.0) return g;
  g.c = a / g.h;
  g.s = b / g.h;
  return g;
}

void rotate_columns(Eigen::MatrixXd& m, int i, int j, const Givens& g) {
  for (int k = 0; k < m.rows(); ++k) {
    const double a = m(k, i);
    const double b = m(k, j);
    m(k, i) = g.c * a + g.s * b;
    m(k, j) = -g.s * a + g.c * b;
  }
}

}  // namespace

double KktResidual::max() const {
  return std::max({stationarity, primal, dual, complementarity});
}

DenseQp::DenseQp(Eigen::MatrixXd h, Eigen::MatrixXd c) : h_(std::move(h)), c_(std::move(c)) {
  const int n = static_cast<int>(h_.rows());
  if (h_.cols() != n || c_.cols() != n) throw std::invalid_argument("DenseQp: dimension mismatch");
  h_ = 0.5 * (h_ + h_.transpose());
  llt_.compute(h_);
  if (llt_.info() != Eigen::Success) throw std::invalid_argument("DenseQp: H is not positive definite");
  const Eigen::MatrixXd l = llt_.matrixL();
  j0_ = l.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
  row_norm_ = c_.rowwise().norm();
  c_unit_ = c_;
  for (int i = 0; i < c_.rows(); ++i) {
    if (row_norm_(i) == 0.0) throw std::invalid_argument("DenseQp: zero constraint row");
    c_unit_.row(i) /= row_norm_(i);
  }
}

QpSolution DenseQp::solve(const Eigen::VectorXd& f, const Eigen::VectorXd& d_raw) const {
  const int n = num_variables();
  const int m = num_constraints();
  if (f.size() != n || d_raw.size() != m) throw std::invalid_argument("DenseQp::solve: bad sizes");
  const Eigen::VectorXd d = d_raw.cwiseQuotient(row_norm_);

  QpSolution sol;
  Eigen::VectorXd x = -llt_.solve(f);
  Eigen::MatrixXd J = j0_;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> active;
  std::vector<double> u;
  std::vector<char> is_active(m, 0);
  const double tol = 1e-11;
  const int max_iterations = 20 * (n + m) + 100;

  auto drop = [&](int l) {
    const int q = static_cast<int>(active.size());
    is_active[active[l]] = 0;
    active.erase(active.begin() + l);
    u.erase(u.begin() + l);
    for (int k = l; k < q - 1; ++k) R.col(k) = R.col(k + 1);
    R.col(q - 1).setZero();
    for (int j = l; j < q - 1; ++j) {
      const Givens g = make_givens(R(j, j), R(j + 1, j));
      if (g.h == 0.0) continue;
      for (int k = j; k < q - 1; ++k) {
        const double a = R(j, k);
        const double b = R(j + 1, k);
        R(j, k) = g.c * a + g.s * b;
        R(j + 1, k) = -g.s * a + g.c * b;
      }
      rotate_columns(J, j, j + 1, g);
    }
  };

  int iterations = 0;
  while (true) {
    // Most violated constraint (unit rows, so slacks are comparable).
    Eigen::VectorXd slack = d - c_unit_ * x;
    int p = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      if (is_active[i]) continue;
      const double thr = -tol * (1.0 + std::abs(d(i)));
      if (slack(i) < thr && slack(i) < worst) {
        worst = slack(i);
        p = i;
      }
    }
    if (p < 0) {
      sol.status = QpStatus::kOptimal;
      break;
    }
    const Eigen::VectorXd np = -c_unit_.row(p).transpose();
    double sp = slack(p);  // n_pᵀx − b_p in the ≥ form, negative here
    std::vector<double> u_plus = u;
    u_plus.push_back(0.0);

    bool added = false;
    while (!added) {
      if (++iterations > max_iterations) {
        sol.status = QpStatus::kIterationLimit;
        break;
      }
      const int q = static_cast<int>(active.size());
      Eigen::VectorXd dv = J.transpose() * np;
      const Eigen::VectorXd z = J.rightCols(n - q) * dv.tail(n - q);
      Eigen::VectorXd r;
      if (q > 0) {
        r = R.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(dv.head(q));
      }
      double t1 = kInf;
      int l = -1;
      for (int j = 0; j < q; ++j) {
        if (r(j) > 1e-14) {
          const double ratio = u_plus[j] / r(j);
          if (ratio < t1) {
            t1 = ratio;
            l = j;
          }
        }
      }
      const double znp = z.dot(np);
      double t2 = kInf;
      if (z.norm() > 1e-12 * (1.0 + np.norm()) && znp > 0.0) t2 = -sp / znp;
      const double t = std::min(t1, t2);
      if (t == kInf) {
        sol.status = QpStatus::kInfeasible;
        sol.blocking_row = p;
        break;
      }
      for (int j = 0; j < q; ++j) u_plus[j] -= t * r(j);
      u_plus[q] += t;
      if (t2 < kInf) {
        x += t * z;
        sp = (d(p) - c_unit_.row(p).dot(x));
      }
      if (t2 <= t1) {
        // Full step: p joins the active set.
        for (int j = n - 1; j > q; --j) {
          const Givens g = make_givens(dv(j - 1), dv(j));
          if (g.h == 0.0) continue;
          dv(j - 1) = g.h;
          dv(j) = 0.0;
          rotate_columns(J, j - 1, j, g);
        }
        R.col(q).head(q + 1) = dv.head(q + 1);
        active.push_back(p);
        is_active[p] = 1;
        u = u_plus;
        added = true;
      } else {
        // Partial step: drop the blocking active constraint and retry.
        const double pending = u_plus.back();
        u.assign(u_plus.begin(), u_plus.end() - 1);
        drop(l);
        u_plus = u;
        u_plus.push_back(pending);
      }
    }
    if (sol.status != QpStatus::kOptimal && !added) break;
  }

  sol.iterations = iterations;
  sol.x = x;
  sol.lambda = Eigen::VectorXd::Zero(m);
  for (std::size_t j = 0; j < active.size(); ++j) {
    sol.lambda(active[j]) = std::max(0.0, u[j]) / row_norm_(active[j]);
  }
  sol.active = active;
  sol.objective = 0.5 * x.dot(h_ * x) + f.dot(x);
  return sol;
}

KktResidual kkt_residual(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                         const Eigen::MatrixXd& c, const Eigen::VectorXd& d,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
  KktResidual res;
  const Eigen::VectorXd grad = h * x + f + c.transpose() * lambda;
  const double scale = 1.0 + f.cwiseAbs().maxCoeff() +
                       h.cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().maxCoeff();
  res.stationarity = grad.cwiseAbs().maxCoeff() / scale;
  for (int i = 0; i < c.rows(); ++i) {
    const double norm = c.row(i).norm();
    const double slack = (d(i) - c.row(i).dot(x)) / norm;
    res.primal = std::max(res.primal, -slack);
    res.dual = std::max(res.dual, -lambda(i) * norm);
    res.complementarity =
        std::max(res.complementarity, std::abs(lambda(i) * norm * slack) / scale);
  }
  return res;
}

}  // namespace tubeuav::trmpc
