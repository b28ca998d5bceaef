#include "tubeuav/trmpc/lmi.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tubeuav::trmpc {

Eigen::MatrixXd AffineMatrix::evaluate(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd out = constant;
  for (std::size_t j = 0; j < coefficients.size(); ++j) out += x(j) * coefficients[j];
  return out;
}

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

struct Barrier {
  const std::vector<AffineMatrix>& blocks;
  const std::vector<AffineMatrix>& bounds;
  int nx;

  // Variables are (x, s). Blocks carry −sI; bounds do not.
  Eigen::MatrixXd block_value(std::size_t i, const Eigen::VectorXd& v) const {
    Eigen::MatrixXd m = blocks[i].evaluate(v.head(nx));
    m.diagonal().array() -= v(nx);
    return m;
  }

  // Returns +inf outside the domain.
  double value(const Eigen::VectorXd& v, double t) const {
    double f = -t * v(nx);
    auto add = [&](const Eigen::MatrixXd& m) {
      Eigen::LLT<Eigen::MatrixXd> llt(m);
      if (llt.info() != Eigen::Success) return false;
      const Eigen::VectorXd d = Eigen::MatrixXd(llt.matrixL()).diagonal();
      if ((d.array() <= 0.0).any()) return false;
      f -= 2.0 * d.array().log().sum();
      return true;
    };
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (!add(block_value(i, v))) return std::numeric_limits<double>::infinity();
    }
    for (const auto& bnd : bounds) {
      if (!add(bnd.evaluate(v.head(nx)))) return std::numeric_limits<double>::infinity();
    }
    return f;
  }

  void derivatives(const Eigen::VectorXd& v, double t, Eigen::VectorXd& g,
                   Eigen::MatrixXd& h) const {
    const int nv = nx + 1;
    g = Eigen::VectorXd::Zero(nv);
    g(nx) = -t;
    h = Eigen::MatrixXd::Zero(nv, nv);
    auto accumulate = [&](const Eigen::MatrixXd& m, const AffineMatrix& fn, bool with_s) {
      const Eigen::MatrixXd inv = m.llt().solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
      std::vector<Eigen::MatrixXd> w(nv);
      for (int j = 0; j < nx; ++j) w[j] = inv * fn.coefficients[j];
      w[nx] = with_s ? Eigen::MatrixXd(-inv) : Eigen::MatrixXd::Zero(m.rows(), m.cols());
      for (int j = 0; j < nv; ++j) {
        g(j) -= w[j].trace();
        for (int k = j; k < nv; ++k) {
          const double hjk = (w[j].array() * w[k].transpose().array()).sum();
          h(j, k) += hjk;
          if (k != j) h(k, j) += hjk;
        }
      }
    };
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      accumulate(block_value(i, v), blocks[i], true);
    }
    for (const auto& bnd : bounds) accumulate(bnd.evaluate(v.head(nx)), bnd, false);
  }
};

}  // namespace

LmiResult solve_lmi_feasibility(const std::vector<AffineMatrix>& blocks,
                                const std::vector<AffineMatrix>& bounds,
                                const Eigen::VectorXd& x0, const LmiOptions& options) {
  const int nx = static_cast<int>(x0.size());
  for (const auto& b : blocks) {
    if (static_cast<int>(b.coefficients.size()) != nx) throw std::invalid_argument("lmi: bad block");
  }
  for (const auto& b : bounds) {
    if (static_cast<int>(b.coefficients.size()) != nx) throw std::invalid_argument("lmi: bad bound");
    if (min_eigenvalue(b.evaluate(x0)) <= 0.0) {
      throw std::invalid_argument("lmi: starting point violates a bound");
    }
  }
  Barrier barrier{blocks, bounds, nx};
  Eigen::VectorXd v(nx + 1);
  v.head(nx) = x0;
  double s0 = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) s0 = std::min(s0, min_eigenvalue(b.evaluate(x0)));
  v(nx) = s0 - 1.0;

  auto margin_of = [&](const Eigen::VectorXd& x) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) m = std::min(m, min_eigenvalue(b.evaluate(x)));
    return m;
  };

  double total_dim = 0.0;
  for (const auto& b : blocks) total_dim += static_cast<double>(b.constant.rows());
  for (const auto& b : bounds) total_dim += static_cast<double>(b.constant.rows());

  LmiResult result;
  double t = 1.0;
  int steps = 0;
  while (steps < options.max_newton_steps) {
    // Centering for the current t.
    for (int inner = 0; inner < 50 && steps < options.max_newton_steps; ++inner, ++steps) {
      Eigen::VectorXd g;
      Eigen::MatrixXd h;
      barrier.derivatives(v, t, g, h);
      h.diagonal().array() += 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
      const Eigen::VectorXd dx = -h.ldlt().solve(g);
      const double decrement = -g.dot(dx);
      if (!(decrement > 1e-10)) break;
      const double f0 = barrier.value(v, t);
      double step = 1.0;
      while (step > 1e-12) {
        const Eigen::VectorXd trial = v + step * dx;
        const double f1 = barrier.value(trial, t);
        if (f1 <= f0 - 0.25 * step * decrement) {
          v = trial;
          break;
        }
        step *= 0.5;
      }
      if (step <= 1e-12) break;
      if (margin_of(v.head(nx)) > options.target_margin) break;
    }
    const double margin = margin_of(v.head(nx));
    if (margin > options.target_margin) {
      result.feasible = true;
      break;
    }
    // Duality gap bound total_dim / t on the achievable margin.
    if (total_dim / t < 1e-9 * (1.0 + std::abs(v(nx)))) break;
    t *= 8.0;
  }
  result.x = v.head(nx);
  result.margin = margin_of(result.x);
  result.feasible = result.margin > 0.0;
  return result;
}

std::optional<Eigen::MatrixXd> quadratic_stability_gain(const std::vector<VertexPair>& vertices,
                                                        const LmiOptions& options) {
  if (vertices.empty()) throw std::invalid_argument("quadratic_stability_gain: no vertices");
  const int n = static_cast<int>(vertices.front().a.rows());
  const int m = static_cast<int>(vertices.front().b.cols());
  const int ny = n * (n + 1) / 2;
  const int nx = ny + m * n;

  // Basis for Y (symmetric) and L.
  std::vector<Eigen::MatrixXd> y_basis;
  std::vector<Eigen::MatrixXd> l_basis;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      y_basis.push_back(e);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, n);
      e(i, j) = 1.0;
      l_basis.push_back(e);
    }
  }

  std::vector<AffineMatrix> blocks;
  AffineMatrix ypos{Eigen::MatrixXd::Zero(n, n), {}};
  for (int j = 0; j < ny; ++j) ypos.coefficients.push_back(y_basis[j]);
  for (int j = 0; j < m * n; ++j) ypos.coefficients.push_back(Eigen::MatrixXd::Zero(n, n));
  blocks.push_back(ypos);

  for (const auto& v : vertices) {
    AffineMatrix blk{Eigen::MatrixXd::Zero(2 * n, 2 * n), {}};
    auto make = [&](const Eigen::MatrixXd& y, const Eigen::MatrixXd& lower) {
      Eigen::MatrixXd f(2 * n, 2 * n);
      f << y, lower.transpose(), lower, y;
      return f;
    };
    for (int j = 0; j < ny; ++j) blk.coefficients.push_back(make(y_basis[j], v.a * y_basis[j]));
    for (int j = 0; j < m * n; ++j) {
      blk.coefficients.push_back(make(Eigen::MatrixXd::Zero(n, n), v.b * l_basis[j]));
    }
    blocks.push_back(blk);
  }

  // Normalization: Y ⪯ I and a loose bound on L.
  std::vector<AffineMatrix> bounds;
  AffineMatrix ycap{Eigen::MatrixXd::Identity(n, n), {}};
  for (int j = 0; j < ny; ++j) ycap.coefficients.push_back(-y_basis[j]);
  for (int j = 0; j < m * n; ++j) ycap.coefficients.push_back(Eigen::MatrixXd::Zero(n, n));
  bounds.push_back(ycap);
  double b_scale = 1.0;
  for (const auto& v : vertices) b_scale = std::max(b_scale, v.a.norm() / std::max(1e-12, v.b.norm()));
  const double l_cap = 1e3 * b_scale;
  AffineMatrix lcap{Eigen::MatrixXd::Identity(n + m, n + m) * l_cap, {}};
  for (int j = 0; j < ny; ++j) lcap.coefficients.push_back(Eigen::MatrixXd::Zero(n + m, n + m));
  for (int j = 0; j < m * n; ++j) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n + m, n + m);
    f.topRightCorner(n, m) = l_basis[j].transpose();
    f.bottomLeftCorner(m, n) = l_basis[j];
    lcap.coefficients.push_back(-f);
  }
  bounds.push_back(lcap);

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(nx);
  for (int i = 0, k = 0; i < n; ++i) {
    for (int j = i; j < n; ++j, ++k) {
      if (i == j) x0(k) = 0.5;
    }
  }
  const LmiResult res = solve_lmi_feasibility(blocks, bounds, x0, options);
  if (!res.feasible) return std::nullopt;

  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < ny; ++j) y += res.x(j) * y_basis[j];
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, n);
  for (int j = 0; j < m * n; ++j) l += res.x(ny + j) * l_basis[j];
  return Eigen::MatrixXd(l * y.inverse());
}

}  // namespace tubeuav::trmpc
