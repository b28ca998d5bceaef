#include "tubeuav/setcalc/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace tubeuav::setcalc {
namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-11;

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& E, const Eigen::VectorXd& f)
      : rows_(E.rows()), cols_(E.cols()), T_(E.rows(), E.cols() + E.rows() + 1) {
    T_.setZero();
    sign_.resize(rows_);
    for (int i = 0; i < rows_; ++i) {
      sign_[i] = f(i) < 0 ? -1.0 : 1.0;
      T_.row(i).head(cols_) = sign_[i] * E.row(i);
      T_(i, cols_ + i) = 1.0;
      T_(i, rhs()) = sign_[i] * f(i);
    }
    basis_.resize(rows_);
    for (int i = 0; i < rows_; ++i) basis_[i] = cols_ + i;
  }

  int rhs() const { return cols_ + rows_; }
  bool is_artificial(int j) const { return j >= cols_; }

  // Runs Bland's-rule simplex for the cost vector `cost` (over all columns).
  // Columns with index >= `enter_limit` never enter the basis.
  LpStatus optimize(const Eigen::VectorXd& cost, int enter_limit) {
    const int max_pivots = 50 * (rows_ + cols_) + 1000;
    for (int it = 0; it < max_pivots; ++it) {
      int entering = -1;
      for (int j = 0; j < enter_limit; ++j) {
        if (reduced_cost(cost, j) < -kCostTol * (1.0 + std::abs(cost(j)))) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;

      int leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows_; ++i) {
        const double a = T_(i, entering);
        if (a <= kPivotTol) continue;
        const double ratio = T_(i, rhs()) / a;
        if (ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && leaving >= 0 && basis_[i] < basis_[leaving])) {
          best = ratio;
          leaving = i;
        }
      }
      if (leaving < 0) return LpStatus::kUnbounded;
      pivot(leaving, entering);
    }
    // Bland's rule cannot cycle; reaching the cap means numerical trouble.
    return LpStatus::kOptimal;
  }

  double reduced_cost(const Eigen::VectorXd& cost, int j) const {
    double r = cost(j);
    for (int i = 0; i < rows_; ++i) r -= cost(basis_[i]) * T_(i, j);
    return r;
  }

  void pivot(int r, int c) {
    T_.row(r) /= T_(r, c);
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double factor = T_(i, c);
      if (factor != 0.0) T_.row(i) -= factor * T_.row(r);
    }
    basis_[r] = c;
  }

  // Pivots zero-level artificials out of the basis where possible.
  void expel_artificials() {
    for (int i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      int best = -1;
      double mag = kPivotTol;
      for (int j = 0; j < cols_; ++j) {
        if (std::abs(T_(i, j)) > mag) {
          mag = std::abs(T_(i, j));
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(cols_);
    for (int i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[i])) y(basis_[i]) = std::max(0.0, T_(i, rhs()));
    }
    return y;
  }

  double artificial_sum() const {
    double s = 0.0;
    for (int i = 0; i < rows_; ++i) {
      if (is_artificial(basis_[i])) s += T_(i, rhs());
    }
    return s;
  }

  const std::vector<int>& basis() const { return basis_; }

 private:
  int rows_;
  int cols_;
  Eigen::MatrixXd T_;
  std::vector<double> sign_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_standard_form(const Eigen::VectorXd& c, const Eigen::MatrixXd& E,
                             const Eigen::VectorXd& f) {
  const int m = E.rows();
  const int k = E.cols();
  LpResult result;
  Tableau tab(E, f);

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(k + m);
  phase1.tail(m).setOnes();
  tab.optimize(phase1, k);
  const double scale = 1.0 + f.cwiseAbs().maxCoeff();
  if (tab.artificial_sum() > 1e-9 * scale) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  tab.expel_artificials();

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(k + m);
  phase2.head(k) = c;
  result.status = tab.optimize(phase2, k);
  if (result.status != LpStatus::kOptimal) return result;

  result.y = tab.primal();
  result.value = c.dot(result.y);

  // Multipliers from Bᵀπ = c_B using the original (unflipped) columns.
  Eigen::MatrixXd B(m, m);
  Eigen::VectorXd cb(m);
  const auto& basis = tab.basis();
  for (int i = 0; i < m; ++i) {
    if (basis[i] < k) {
      B.col(i) = E.col(basis[i]);
      cb(i) = c(basis[i]);
    } else {
      B.col(i) = Eigen::VectorXd::Unit(m, basis[i] - k);
      cb(i) = 0.0;
    }
  }
  result.multipliers = B.transpose().fullPivLu().solve(cb);
  return result;
}

namespace {

HalfspaceLpResult dual_support(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& d) {
  HalfspaceLpResult out;
  const LpResult dual = solve_standard_form(b, A.transpose(), d);
  if (dual.status == LpStatus::kOptimal) {
    out.status = LpStatus::kOptimal;
    out.value = dual.value;
    out.argmax = dual.multipliers;
  } else if (dual.status == LpStatus::kUnbounded) {
    out.status = LpStatus::kInfeasible;
  } else {
    // Dual infeasible: the primal is unbounded or empty.
    out.status = LpStatus::kUnbounded;
  }
  return out;
}

}  // namespace

ChebyshevBall chebyshev_ball(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             double radius_cap) {
  const int m = A.rows();
  const int n = A.cols();
  Eigen::MatrixXd Aug = Eigen::MatrixXd::Zero(m + 1, n + 1);
  Eigen::VectorXd bug(m + 1);
  Aug.topLeftCorner(m, n) = A;
  for (int i = 0; i < m; ++i) Aug(i, n) = A.row(i).norm();
  bug.head(m) = b;
  Aug(m, n) = 1.0;
  bug(m) = radius_cap;
  const auto res = dual_support(Aug, bug, Eigen::VectorXd::Unit(n + 1, n));
  ChebyshevBall ball;
  if (res.status != LpStatus::kOptimal) {
    ball.center = Eigen::VectorXd::Zero(n);
    ball.radius = -std::numeric_limits<double>::infinity();
    return ball;
  }
  ball.center = res.argmax.head(n);
  ball.radius = res.value;
  return ball;
}

HalfspaceLpResult maximize_over_halfspaces(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& d) {
  HalfspaceLpResult out = dual_support(A, b, d);
  if (out.status == LpStatus::kUnbounded) {
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (chebyshev_ball(A, b).radius < -1e-9 * scale) out.status = LpStatus::kInfeasible;
  }
  return out;
}

}  // namespace tubeuav::setcalc
