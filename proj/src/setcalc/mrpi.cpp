#include "tubeuav/setcalc/mrpi.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace tubeuav::setcalc {

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

MrpiResult mrpi_approx(const Eigen::MatrixXd& a_k, const Polytope& w, double eps,
                       const MrpiOptions& options) {
  const int n = w.dim();
  if (a_k.rows() != n || a_k.cols() != n) throw SetError("mrpi_approx: A_K has wrong size");
  if (!(eps > 0.0)) throw SetError("mrpi_approx: eps must be positive");
  const double rho = spectral_radius(a_k);
  if (!(rho < 1.0)) {
    throw SetError("mrpi_approx: A_K is not Schur stable (spectral radius " +
                   std::to_string(rho) + ")");
  }
  if (!w.contains(Eigen::VectorXd::Zero(n), 1e-12)) {
    throw SetError("mrpi_approx: W does not contain the origin");
  }

  std::vector<Eigen::VectorXd> w_vertices;
  if (!w.is_box()) w_vertices = w.vertices();
  const std::function<double(const Eigen::VectorXd&)> h_w = [&](const Eigen::VectorXd& d) {
    if (w.is_box()) return w.support(d);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : w_vertices) best = std::max(best, d.dot(v));
    return best;
  };

  double w_radius = 0.0;
  for (int j = 0; j < n; ++j) {
    w_radius = std::max({w_radius, h_w(Eigen::VectorXd::Unit(n, j)),
                         h_w(-Eigen::VectorXd::Unit(n, j))});
  }
  MrpiResult result;
  if (w_radius == 0.0) {
    result.set = Polytope::origin(n);
    result.terms = 1;
    result.exact = true;
    return result;
  }

  const double w_scale = 1.0 + w.offsets().cwiseAbs().maxCoeff();
  auto alpha_of = [&](const Eigen::MatrixXd& power) {
    double alpha = 0.0;
    for (int i = 0; i < w.rows(); ++i) {
      const double h = h_w(power.transpose() * w.normals().row(i).transpose());
      const double g = w.offsets()(i);
      if (g <= 1e-15 * w_scale) {
        if (h > 1e-15 * w_scale) return std::numeric_limits<double>::infinity();
        continue;
      }
      alpha = std::max(alpha, h / g);
    }
    return alpha;
  };

  std::vector<Eigen::MatrixXd> powers{Eigen::MatrixXd::Identity(n, n)};
  Eigen::VectorXd upper = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd lower = Eigen::VectorXd::Zero(n);
  int s = 0;
  double alpha = 0.0;
  for (int terms = 1; terms <= options.max_terms; ++terms) {
    const Eigen::MatrixXd& last = powers.back();
    for (int j = 0; j < n; ++j) {
      upper(j) += h_w(last.transpose() * Eigen::VectorXd::Unit(n, j));
      lower(j) += h_w(-last.transpose() * Eigen::VectorXd::Unit(n, j));
    }
    const Eigen::MatrixXd next = a_k * last;
    const double radius = std::max(upper.maxCoeff(), lower.maxCoeff());
    const double a = alpha_of(next);
    if (a <= eps / (eps + radius)) {
      s = terms;
      alpha = a;
      break;
    }
    powers.push_back(next);
  }
  if (s == 0) {
    throw NonConvergent("mrpi_approx: no admissible term count within " +
                        std::to_string(options.max_terms) + " terms");
  }
  powers.resize(s);

  auto h_s = [&](const Eigen::VectorXd& c) {
    double sum = 0.0;
    for (const auto& power : powers) sum += h_w(power.transpose() * c);
    return sum / (1.0 - alpha);
  };

  std::vector<Eigen::VectorXd> normals;
  bool exact = false;
  {
    const FaceLattice lattice = vertices_and_edges(w);
    std::vector<Eigen::VectorXd> dirs;
    for (const auto& power : powers) {
      for (const auto& e : lattice.edge_directions) {
        Eigen::VectorXd d = power * e;
        const double norm = d.norm();
        if (norm < 1e-14) continue;
        d /= norm;
        bool parallel = false;
        for (const auto& existing : dirs) {
          if (std::abs(std::abs(existing.dot(d)) - 1.0) < 1e-12) {
            parallel = true;
            break;
          }
        }
        if (!parallel) dirs.push_back(d);
      }
    }
    try {
      normals = hyperplane_normals(dirs, n, options.exact_normal_limit);
      exact = true;
    } catch (const SetError&) {
      normals.clear();
    }
  }
  for (int j = 0; j < n; ++j) {
    normals.push_back(Eigen::VectorXd::Unit(n, j));
    normals.push_back(-Eigen::VectorXd::Unit(n, j));
  }
  for (int i = 0; i < w.rows(); ++i) normals.push_back(w.normals().row(i).transpose());
  for (const auto& d : options.extra_directions) {
    if (d.size() != n || d.norm() == 0.0) throw SetError("mrpi_approx: bad extra direction");
    normals.push_back(d.normalized());
    normals.push_back(-d.normalized());
  }
  if (!exact) {
    for (const auto& d : metric_directions(n)) normals.push_back(d);
  }

  result.set = from_support(normals, h_s).without_redundant_rows();
  result.terms = s;
  result.alpha = alpha;
  result.exact = exact;
  return result;
}

}  // namespace tubeuav::setcalc
