#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "obstacle_ridge/obstacle.hpp"
#include "obstacle_ridge/seeding.hpp"
#include "obstacle_ridge/target.hpp"
#include "obstacle_ridge/threading.hpp"

namespace obstacle_ridge {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {
McEstimate mc_sphere_mean_impl(const Eigen::VectorXd& center, double radius,
                               const std::function<double(const Eigen::VectorXd&)>& h,
                               std::int64_t samples, std::uint64_t seed);
}

/// Monte-Carlo spherical mean over uniform directions (normalized Gaussians).
/// Per-sample streams are derived from (seed, index) and partial sums are
/// reduced with a fixed pairwise tree, so the estimate is bit-identical for
/// any worker count.
template <class F>
McEstimate mc_sphere_mean(const Eigen::VectorXd& center, double radius, F&& h,
                          std::int64_t samples, std::uint64_t seed) {
  return detail::mc_sphere_mean_impl(center, radius,
                                     std::function<double(const Eigen::VectorXd&)>(
                                         std::forward<F>(h)),
                                     samples, seed);
}

/// |boundary mean of the scaled potential over the sphere dB(y, rho) minus its
/// value at y|. On the admissible region the potential coincides with the
/// kernel and is harmonic, so the residual is pure quadrature error.
/// Requires B(y, rho) disjoint from the closed obstacle (||y-x|| > R + rho).
double harmonicity_residual(const GreenKernel& kernel, const Obstacle& o,
                            const ConstVecRef& y, double rho,
                            const SphereQuadrature& q);

/// Seeded uniform sampler over the unit cube [0,1]^d; sample(i) is a pure
/// function of (seed, i).
struct UniformCubeSampler {
  int dimension = 3;
  std::uint64_t seed = 0;

  Eigen::VectorXd sample(std::int64_t index) const {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
    Eigen::VectorXd x(dimension);
    for (int k = 0; k < dimension; ++k) x[k] = rng.uniform01();
    return x;
  }
};

struct RatioEstimate {
  double value = 0.0;
  double std_error = 0.0;  ///< MC error of the numerator, scaled like value
  bool degenerate = false;
};

/// Monte-Carlo estimate of  int (g - P_x^gamma g)^2 dnu / E(g, g)  for a
/// representer-combination g. The Poincare-type bound predicts decay
/// gamma^{beta/(beta-alpha)} as the threshold grows.
RatioEstimate poincare_ratio(const GreenKernel& kernel, const SyntheticTarget& g,
                             double gamma, const UniformCubeSampler& nu,
                             std::int64_t n_samples, const SphereQuadrature& q);

/// Monte-Carlo estimate of  int (P_x^gamma g)^2 dnu  divided by
/// gamma^{beta/(beta-alpha)} E(g, g) + ||g||^2_{L2(nu)}, both sides from the
/// same samples. Bounded by a constant under the second-moment estimate.
RatioEstimate second_moment_ratio(const GreenKernel& kernel,
                                  const SyntheticTarget& g, double gamma,
                                  const UniformCubeSampler& nu,
                                  std::int64_t n_samples,
                                  const SphereQuadrature& q);

/// One line of the verification report.
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
};

struct CheckConfig {
  std::uint64_t seed = 1;
  int quad_level = 3;
  std::int64_t mc_samples = 100000;
  std::int64_t poincare_samples = 10000;
  int poincare_seeds = 5;
  double poincare_gamma_base = 1.0;
};

/// Runs the full oracle suite: determinstic-vs-MC agreement, harmonicity,
/// potential identities, capacity identity, Poincare scaling, second-moment
/// boundedness, seed stability, and worker-count reproducibility.
std::vector<CheckResult> run_check_suite(const CheckConfig& cfg);

}  // namespace obstacle_ridge
