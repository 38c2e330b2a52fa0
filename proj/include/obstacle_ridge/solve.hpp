#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "obstacle_ridge/gram.hpp"

namespace obstacle_ridge {

struct RidgeSolution {
  Eigen::VectorXd c;
  double applied_jitter = 0.0;
  double residual_norm = 0.0;  ///< ||(G + n*lambda*I) c - y||_2
};

/// Solves (G + n_lambda I) c = y by Cholesky with the psd_jitter ladder as
/// fallback, then refines against the unshifted system until the residual
/// contract ||r|| <= 1e-8 ||y|| holds (in practice it lands near machine
/// precision). Throws SingularSystemError for n_lambda = 0 on a system the
/// ladder cannot repair.
RidgeSolution ridge_solve(const GramMatrix& gm, const Eigen::VectorXd& y,
                          double n_lambda);

/// Squared Dirichlet norm of the fitted combination: c^T G c, clamped at 0.
double h_norm_sq(const GramMatrix& gm, const Eigen::VectorXd& c);

struct ErmSolution {
  Eigen::VectorXd c;
  double lambda_active = 0.0;
  /// (lambda, c^T G c) at every evaluation of the regularization path.
  std::vector<std::pair<double, double>> trace;
};

/// Constrained least squares: minimize (1/n)||y - G c||^2 over c^T G c <= M^2.
/// The unconstrained minimizer (at the jitter floor) is returned when feasible;
/// otherwise the Lagrange multiplier is located by bisection on the monotone
/// map lambda -> c(lambda)^T G c(lambda), where c(lambda) = (G + n lambda I)^-1 y.
/// One symmetric eigendecomposition makes every path evaluation O(n).
ErmSolution erm_solve(const GramMatrix& gm, const Eigen::VectorXd& y,
                      double radius);

}  // namespace obstacle_ridge
