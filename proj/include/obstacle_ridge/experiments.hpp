#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "obstacle_ridge/estimator.hpp"
#include "obstacle_ridge/target.hpp"

namespace obstacle_ridge {

/// Draws a synthetic ground truth inside the hypothesis space: K truncated
/// representers with centers uniform in [0.2, 0.8]^d and coefficients uniform
/// in [-1, 1]. The exact Dirichlet energy comes from the Gram machinery at
/// threshold tau.
SyntheticTarget synth_target(int dimension, int n_centers, double tau,
                             std::uint64_t seed, const SphereQuadrature& q);

/// X_i ~ U([0,1]^d) i.i.d., Y_i = f*(X_i) + eps_i with eps_i ~ N(0, rho^2);
/// covariate and noise streams are derived separately from the seed.
Dataset sample_dataset(const SyntheticTarget& target, std::int64_t n, double rho,
                       std::uint64_t seed);

/// Monte-Carlo estimate of ||f_hat - f*||^2_{L2(nu)} on fresh uniform points.
double mse_estimate(const FittedModel& m, const SyntheticTarget& target,
                    std::int64_t n_test, std::uint64_t seed);

struct ExperimentConfig {
  int dimension = 3;
  std::vector<std::int64_t> n_grid;
  std::vector<std::uint64_t> seeds;
  double gamma0 = 1.0;
  double lambda0 = 1.0;
  bool linked = false;   ///< couple lambda = kappa gamma^{2/(2-d)}
  double kappa = 1.0;
  ScheduleMode mode = ScheduleMode::ridge;
  double noise_sd = 0.5;
  std::int64_t test_size = 4096;
  int quad_level = 3;
  int target_centers = 5;
  double target_tau = 4.0;
  std::uint64_t target_seed = 7;
  double erm_radius_factor = 2.0;  ///< M = factor * ||f*||_H in erm mode
};

struct RateCell {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  double lambda = 0.0;
  double mse = 0.0;
  double wall_ms = 0.0;
};

struct RateStudyResult {
  std::vector<RateCell> cells;            ///< n-major, seed-minor order
  std::vector<double> mean_mse;           ///< one entry per n_grid value
  double slope = 0.0;                     ///< log-log fit of mean MSE vs n
  double slope_stderr = 0.0;
  std::vector<double> per_seed_slopes;    ///< one entry per seed
  double target_energy = 0.0;             ///< exact ||f*||^2_H
};

/// Fits each (n, seed) cell under the configured schedule and regresses
/// log(mean MSE) on log n. A cell failure aborts the study with the cell
/// identity in the error message.
RateStudyResult run_rate_study(const ExperimentConfig& cfg);

struct IllposedRow {
  double width = 0.0;
  double max_interp_error = 0.0;  ///< max_i |g_h(X_i) - Y_i|
  double energy = 0.0;            ///< Dirichlet energy of the bump combination
  double l2_norm_sq = 0.0;        ///< MC estimate of ||g_h||^2_{L2(nu)}
};

struct IllposedResult {
  std::vector<IllposedRow> rows;
  double energy_exponent = 0.0;  ///< log-log slope of energy vs width
  double bump_energy_constant = 0.0;  ///< E_b = int ||grad b||^2
  Eigen::MatrixXd points;
  Eigen::VectorXd responses;
  double min_separation = 0.0;
};

/// Zero-loss minimizing sequence of the unrenormalized objective: quartic
/// bumps b(r) = (1-r^2)^2 of shrinking width h interpolate the data exactly
/// while the Dirichlet energy scales as h^{d-2} and the L2(nu) norm vanishes.
IllposedResult illposed_demo(int dimension, const std::vector<double>& widths,
                             std::uint64_t seed);

/// Least-squares slope of y against x with its standard error.
std::pair<double, double> fit_slope(const std::vector<double>& x,
                                    const std::vector<double>& y);

}  // namespace obstacle_ridge
