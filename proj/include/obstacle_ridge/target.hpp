#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "obstacle_ridge/gram.hpp"
#include "obstacle_ridge/kernel.hpp"
#include "obstacle_ridge/obstacle.hpp"

namespace obstacle_ridge {

/// Finite combination of truncated representers,
///   f(x) = sum_k a_k min(G(z_k, x), tau),
/// used both as a synthetic regression target and as the test function of the
/// Poincare-type checks. Its Dirichlet energy is exactly a^T G~ a with G~ the
/// Gram matrix assembled at threshold tau, so no energy discretization is
/// ever needed.
struct SyntheticTarget {
  Eigen::MatrixXd centers;  ///< K x d
  Eigen::VectorXd coeffs;   ///< a, length K
  double threshold = 0.0;   ///< tau
  double energy = 0.0;      ///< a^T G~ a
};

double target_eval(const GreenKernel& kernel, const SyntheticTarget& t,
                   const ConstVecRef& x);

/// Capacitary mean P_x^gamma of the target over the boundary sphere of the
/// gamma-obstacle at x. Components whose truncation ball is disjoint from the
/// sphere collapse to the plain kernel value (mean-value property); components
/// engulfing the sphere contribute tau; the remaining shell cases are averaged
/// by quadrature.
double target_capacitary_mean(const GreenKernel& kernel, const SyntheticTarget& t,
                              const ConstVecRef& x, double gamma,
                              const SphereQuadrature& q);

}  // namespace obstacle_ridge
