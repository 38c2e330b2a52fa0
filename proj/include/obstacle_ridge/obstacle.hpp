#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "obstacle_ridge/kernel.hpp"
#include "obstacle_ridge/seeding.hpp"

namespace obstacle_ridge {

/// Uniform measure on the sphere around `center` with total mass 1/gamma,
/// i.e. the equilibrium measure of the ball obstacle (capacity identity).
struct EquilibriumMeasure {
  Eigen::VectorXd center;
  double radius = 0.0;
  double total_mass = 0.0;
};

/// Super-level set {y : G(x, y) >= gamma}: a closed ball around x.
struct Obstacle {
  Eigen::VectorXd center;
  double threshold = 0.0;  ///< gamma
  double radius = 0.0;     ///< level_radius(gamma)

  EquilibriumMeasure measure() const {
    return {center, radius, 1.0 / threshold};
  }

  bool contains(const ConstVecRef& y) const {
    return (y - center).norm() <= radius;
  }
};

enum class QuadratureMode { deterministic, monte_carlo };

/// Immutable node set for spherical averaging. d = 3 uses an equal-weight
/// composite rule (Chebyshev-type panels in z, equispaced azimuths per ring,
/// golden-ratio ring offsets); every node has weight 1/N and polynomials of
/// degree <= 5 integrate exactly. d > 3 draws N uniform directions once from
/// the seed (normalized Gaussians); the set is fixed afterwards, so repeated
/// averages are bit-reproducible.
class SphereQuadrature {
 public:
  QuadratureMode mode() const { return mode_; }
  int dimension() const { return static_cast<int>(nodes_.cols()); }
  int level() const { return level_; }
  std::uint64_t seed() const { return seed_; }
  Eigen::Index node_count() const { return nodes_.rows(); }
  const Eigen::MatrixXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Stable description used in cache keys: mode/d/level/seed.
  std::string descriptor() const;

  friend SphereQuadrature sphere_quadrature(int dimension, int level,
                                            std::uint64_t seed);

 private:
  SphereQuadrature() = default;
  QuadratureMode mode_ = QuadratureMode::deterministic;
  int level_ = 1;
  std::uint64_t seed_ = 0;
  Eigen::MatrixXd nodes_;    // N x d unit directions
  Eigen::VectorXd weights_;  // probability weights, sum 1
};

/// Builds the node set: 100*4^(level-1) deterministic nodes for d = 3,
/// 1000*4^(level-1) seeded Monte-Carlo nodes for d > 3.
SphereQuadrature sphere_quadrature(int dimension, int level,
                                   std::uint64_t seed = 0);

Obstacle make_obstacle(const GreenKernel& kernel, const ConstVecRef& x,
                       double gamma);

/// Hitting probability of the obstacle: min(G(x, y), gamma) / gamma in (0, 1],
/// equal to 1 exactly on the closed obstacle.
double equilibrium_potential(const GreenKernel& kernel, const Obstacle& o,
                             const ConstVecRef& y);

/// Uniform spherical average of h over the obstacle boundary — the capacitary
/// mean replacing the ill-defined pointwise evaluation h(center). Values are
/// reduced with a fixed pairwise tree.
template <class F>
double capacitary_mean(const Obstacle& o, const SphereQuadrature& q, F&& h) {
  const Eigen::MatrixXd& u = q.nodes();
  const Eigen::Index n = u.rows();
  std::vector<double> vals(static_cast<std::size_t>(n));
  Eigen::VectorXd point(o.center.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    point = o.center + o.radius * u.row(j).transpose();
    vals[static_cast<std::size_t>(j)] = q.weights()[j] * h(point);
  }
  return pairwise_sum(vals);
}

}  // namespace obstacle_ridge
