#include "obstacle_ridge/obstacle.hpp"

#include <cmath>
#include <string>

namespace obstacle_ridge {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;

// Equal-weight composite rule on S^2. z runs over K panels of the 5-node
// equal-weight Chebyshev rule (exact through degree 5), each of the 5K rings
// carries M equispaced azimuths with a golden-ratio offset per ring. All
// N = 5KM nodes weigh 1/N; spherical polynomials of degree <= 5 integrate
// exactly and the zonal error falls at 6th order in the panel width.
Eigen::MatrixXd deterministic_nodes_s2(int level) {
  const int panels = 4 << (level - 1);
  const int azimuths = 5 << (level - 1);
  const Eigen::Index n =
      static_cast<Eigen::Index>(5) * panels * azimuths;  // 100 * 4^(level-1)

  // Equal-weight Chebyshev nodes on [-1, 1]: {0, ±sqrt((5∓sqrt(11))/12)}.
  const double a = std::sqrt((5.0 + std::sqrt(11.0)) / 12.0);
  const double b = std::sqrt((5.0 - std::sqrt(11.0)) / 12.0);
  const double panel_nodes[5] = {-a, -b, 0.0, b, a};
  const double golden = 0.6180339887498948482045868;

  Eigen::MatrixXd nodes(n, 3);
  const double h = 2.0 / panels;
  Eigen::Index idx = 0;
  for (int k = 0; k < panels; ++k) {
    const double z_mid = -1.0 + (k + 0.5) * h;
    for (int i = 0; i < 5; ++i) {
      const double z = z_mid + 0.5 * h * panel_nodes[i];
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const int ring = 5 * k + i;
      const double offset = std::fmod(ring * golden, 1.0);
      for (int j = 0; j < azimuths; ++j) {
        const double phi = kTwoPi * (j + offset) / azimuths;
        nodes(idx, 0) = r * std::cos(phi);
        nodes(idx, 1) = r * std::sin(phi);
        nodes(idx, 2) = z;
        ++idx;
      }
    }
  }
  return nodes;
}

Eigen::MatrixXd monte_carlo_nodes(int dimension, int level, std::uint64_t seed) {
  const Eigen::Index n = static_cast<Eigen::Index>(1000)
                         << (2 * (level - 1));  // 1000 * 4^(level-1)
  Eigen::MatrixXd nodes(n, dimension);
  for (Eigen::Index j = 0; j < n; ++j) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (int k = 0; k < dimension; ++k) {
        const double g = rng.normal();
        nodes(j, k) = g;
        norm_sq += g * g;
      }
    } while (norm_sq == 0.0);
    nodes.row(j) /= std::sqrt(norm_sq);
  }
  return nodes;
}
}  // namespace

std::string SphereQuadrature::descriptor() const {
  const char* m = mode_ == QuadratureMode::deterministic ? "det" : "mc";
  return std::string(m) + "/d" + std::to_string(dimension()) + "/l" +
         std::to_string(level_) + "/s" + std::to_string(seed_);
}

SphereQuadrature sphere_quadrature(int dimension, int level, std::uint64_t seed) {
  if (level < 1) throw ParamError("sphere_quadrature requires level >= 1");
  if (dimension < 3) {
    throw DimensionError("sphere_quadrature requires d >= 3, got d = " +
                         std::to_string(dimension));
  }
  SphereQuadrature q;
  q.level_ = level;
  q.seed_ = seed;
  if (dimension == 3) {
    q.mode_ = QuadratureMode::deterministic;
    q.nodes_ = deterministic_nodes_s2(level);
  } else {
    q.mode_ = QuadratureMode::monte_carlo;
    q.nodes_ = monte_carlo_nodes(dimension, level, seed);
  }
  q.weights_ = Eigen::VectorXd::Constant(q.nodes_.rows(), 1.0 / q.nodes_.rows());
  return q;
}

Obstacle make_obstacle(const GreenKernel& kernel, const ConstVecRef& x,
                       double gamma) {
  if (!(gamma > 0.0)) throw ParamError("make_obstacle requires gamma > 0");
  if (x.size() != kernel.dimension()) {
    throw ShapeError("obstacle center has dimension " + std::to_string(x.size()) +
                     ", kernel expects " + std::to_string(kernel.dimension()));
  }
  Obstacle o;
  o.center = x;
  o.threshold = gamma;
  o.radius = kernel.level_radius(gamma);
  return o;
}

double equilibrium_potential(const GreenKernel& kernel, const Obstacle& o,
                             const ConstVecRef& y) {
  return truncated_eval(kernel, o.center, y, o.threshold) / o.threshold;
}

}  // namespace obstacle_ridge
