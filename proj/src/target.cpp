#include "obstacle_ridge/target.hpp"

#include <cmath>
#include <vector>

#include "obstacle_ridge/seeding.hpp"

namespace obstacle_ridge {

double target_eval(const GreenKernel& kernel, const SyntheticTarget& t,
                   const ConstVecRef& x) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < t.centers.rows(); ++k) {
    acc += t.coeffs[k] *
           std::min(kernel.eval(t.centers.row(k).transpose(), x), t.threshold);
  }
  return acc;
}

double target_capacitary_mean(const GreenKernel& kernel, const SyntheticTarget& t,
                              const ConstVecRef& x, double gamma,
                              const SphereQuadrature& q) {
  if (!(gamma > 0.0)) throw ParamError("capacitary mean requires gamma > 0");
  const double sphere_radius = kernel.level_radius(gamma);
  const double trunc_radius = kernel.level_radius(t.threshold);

  double acc = 0.0;
  std::vector<Eigen::Index> shell;
  for (Eigen::Index k = 0; k < t.centers.rows(); ++k) {
    const double dist = (t.centers.row(k).transpose() - x).norm();
    if (dist >= (sphere_radius + trunc_radius) * (1.0 + 1e-9)) {
      // Truncation ball disjoint from the sphere: harmonic, mean = value at x.
      acc += t.coeffs[k] * kernel.eval(t.centers.row(k).transpose(), x);
    } else if (dist + sphere_radius <= trunc_radius * (1.0 - 1e-9)) {
      // Sphere fully inside the truncation ball: integrand is constant tau.
      acc += t.coeffs[k] * t.threshold;
    } else {
      shell.push_back(k);
    }
  }
  if (!shell.empty()) {
    const Eigen::MatrixXd& u = q.nodes();
    const Eigen::Index n = u.rows();
    std::vector<double> vals(static_cast<std::size_t>(n));
    Eigen::VectorXd point(x.size());
    for (Eigen::Index j = 0; j < n; ++j) {
      point = x + sphere_radius * u.row(j).transpose();
      double s = 0.0;
      for (Eigen::Index k : shell) {
        s += t.coeffs[k] *
             std::min(kernel.eval(t.centers.row(k).transpose(), point),
                      t.threshold);
      }
      vals[static_cast<std::size_t>(j)] = q.weights()[j] * s;
    }
    acc += pairwise_sum(vals);
  }
  return acc;
}

}  // namespace obstacle_ridge
