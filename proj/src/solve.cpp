#include "obstacle_ridge/solve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace obstacle_ridge {

namespace {
constexpr int kMaxRefinements = 4;
constexpr int kMaxBisection = 200;
constexpr double kNormTol = 1e-6;
constexpr double kLambdaFloor = 1e-14;

void check_vector(const GramMatrix& gm, const Eigen::VectorXd& v,
                  const char* what) {
  if (v.size() != gm.size()) {
    throw ShapeError(std::string(what) + " has length " + std::to_string(v.size()) +
                     ", Gram matrix has size " + std::to_string(gm.size()));
  }
}
}  // namespace

RidgeSolution ridge_solve(const GramMatrix& gm, const Eigen::VectorXd& y,
                          double n_lambda) {
  check_vector(gm, y, "response vector");
  if (n_lambda < 0.0) throw ParamError("ridge_solve requires n*lambda >= 0");
  if (!gm.entries.allFinite()) {
    throw FactorizationError("Gram matrix has non-finite entries");
  }

  Eigen::MatrixXd system = gm.entries;
  system.diagonal().array() += n_lambda;

  double tau = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    tau = find_psd_jitter(system, gm.gamma);
    system.diagonal().array() += tau;
    llt.compute(system);
    if (llt.info() != Eigen::Success) {
      throw FactorizationError("Cholesky failed after jitter repair");
    }
  }

  RidgeSolution sol;
  sol.applied_jitter = tau;
  sol.c = llt.solve(y);

  // Refine against the unshifted system so the recorded residual refers to
  // (G + n*lambda*I) itself, not the jittered factorization.
  const double y_norm = y.norm();
  Eigen::VectorXd residual =
      y - (gm.entries * sol.c + n_lambda * sol.c);
  sol.residual_norm = residual.norm();
  for (int it = 0; it < kMaxRefinements && sol.residual_norm > 1e-13 * y_norm;
       ++it) {
    const Eigen::VectorXd correction = llt.solve(residual);
    const Eigen::VectorXd candidate = sol.c + correction;
    const Eigen::VectorXd new_residual =
        y - (gm.entries * candidate + n_lambda * candidate);
    if (new_residual.norm() >= sol.residual_norm) break;
    sol.c = candidate;
    residual = new_residual;
    sol.residual_norm = new_residual.norm();
  }

  if (sol.residual_norm > 1e-8 * y_norm) {
    if (n_lambda == 0.0) {
      throw SingularSystemError(
          "unregularized system is singular beyond jitter repair (residual " +
          std::to_string(sol.residual_norm) + ")");
    }
    throw FactorizationError("ridge solve failed the residual contract");
  }
  return sol;
}

double h_norm_sq(const GramMatrix& gm, const Eigen::VectorXd& c) {
  check_vector(gm, c, "coefficient vector");
  return std::max(0.0, c.dot(gm.entries * c));
}

ErmSolution erm_solve(const GramMatrix& gm, const Eigen::VectorXd& y,
                      double radius) {
  check_vector(gm, y, "response vector");
  if (!(radius > 0.0)) throw ParamError("erm_solve requires M > 0");
  if (!gm.entries.allFinite()) {
    throw FactorizationError("Gram matrix has non-finite entries");
  }

  const Eigen::Index n = gm.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gm.entries);
  if (es.info() != Eigen::Success) {
    throw FactorizationError("eigendecomposition of the Gram matrix failed");
  }
  const double w_min = es.eigenvalues().minCoeff();
  // Round-off can push quadrature eigenvalues slightly negative; treat the
  // matrix as its PSD part.
  const Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd beta = es.eigenvectors().transpose() * y;

  const auto coeffs_at_shift = [&](double shift) -> Eigen::VectorXd {
    Eigen::VectorXd scaled(n);
    for (Eigen::Index i = 0; i < n; ++i) scaled[i] = beta[i] / (w[i] + shift);
    return es.eigenvectors() * scaled;
  };
  const auto norm_at_shift = [&](double shift) -> double {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ci = beta[i] / (w[i] + shift);
      acc += w[i] * ci * ci;
    }
    return acc;
  };

  // Jitter floor: the first ladder rung that makes the spectrum positive.
  double floor_shift = w_min > 0.0 ? 0.0 : -1.0;
  if (floor_shift < 0.0) {
    for (int k = -12; k <= -3 && floor_shift < 0.0; ++k) {
      const double tau = std::pow(10.0, k) * gm.gamma;
      if (w_min + tau > 0.0) floor_shift = tau;
    }
    if (floor_shift < 0.0) {
      throw FactorizationError("Gram spectrum not repairable by jitter");
    }
  }

  ErmSolution sol;
  const double m_sq = radius * radius;
  const double unconstrained_norm = norm_at_shift(std::max(floor_shift, 1e-300));
  sol.trace.emplace_back(0.0, unconstrained_norm);
  if (unconstrained_norm <= m_sq) {
    sol.c = coeffs_at_shift(std::max(floor_shift, 1e-300));
    sol.lambda_active = 0.0;
    return sol;
  }

  const double nd = static_cast<double>(n);
  const auto path_norm = [&](double lambda) {
    const double value = norm_at_shift(nd * lambda);
    sol.trace.emplace_back(lambda, value);
    return value;
  };

  double lo = kLambdaFloor;
  const double norm_lo = path_norm(lo);
  if (norm_lo <= m_sq) {
    // The whole admissible path is inside the ball; the floor is as close to
    // the unconstrained solution as the parameterization goes.
    sol.c = coeffs_at_shift(nd * lo);
    sol.lambda_active = lo;
    return sol;
  }

  double hi = std::max(2.0 * kLambdaFloor, gm.gamma / nd);
  int doublings = 0;
  while (path_norm(hi) >= m_sq) {
    hi *= 2.0;
    if (++doublings > 200) {
      throw ConvergenceError("erm_solve could not bracket the norm constraint");
    }
  }

  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = path_norm(mid);
    if (std::abs(value - m_sq) <= kNormTol * m_sq) {
      sol.c = coeffs_at_shift(nd * mid);
      sol.lambda_active = mid;
      return sol;
    }
    if (value > m_sq) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw ConvergenceError("erm_solve bisection did not meet the norm tolerance in " +
                         std::to_string(kMaxBisection) + " steps");
}

}  // namespace obstacle_ridge
