#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "obstacle_ridge/kernel.hpp"
#include "obstacle_ridge/obstacle.hpp"

namespace obstacle_ridge {

/// Renormalized Gram matrix: entry (i, j) is the uniform spherical average of
/// the gamma-truncated kernel centered at point i over the obstacle boundary
/// of point j. Diagonal is exactly gamma; off-diagonal entries lie in (0, gamma).
struct GramMatrix {
  Eigen::MatrixXd entries;
  double gamma = 0.0;
  std::int64_t fast_path_count = 0;  ///< pairs resolved analytically
  double applied_jitter = 0.0;       ///< tau added by psd_jitter, 0 for raw assembly

  Eigen::Index size() const { return entries.rows(); }
};

/// Single renormalized inner product gamma^2 E(e_i, e_j). Separated pairs
/// (||xi-xj|| >= 2R(1+1e-9)) reduce to the plain kernel value by the mean-value
/// property; overlapping pairs are averaged over both boundary spheres.
double gram_entry(const GreenKernel& kernel, const ConstVecRef& xi,
                  const ConstVecRef& xj, double gamma,
                  const SphereQuadrature& q);

/// Quadrature route in isolation (no analytic shortcut); the second leg of the
/// dual-route consistency checks.
double gram_entry_quadrature(const GreenKernel& kernel, const ConstVecRef& xi,
                             const ConstVecRef& xj, double gamma,
                             const SphereQuadrature& q);

/// Assembles the full symmetric matrix over the upper triangle (parallel over
/// rows) and mirrors it, so symmetry is exact by construction.
GramMatrix assemble_gram(const GreenKernel& kernel, const Eigen::MatrixXd& points,
                         double gamma, const SphereQuadrature& q);

/// Adds tau*I, escalating tau through {0, 1e-12 gamma, ..., 1e-3 gamma} until a
/// Cholesky factorization succeeds. Throws FactorizationError on non-finite
/// input or when the ladder is exhausted.
GramMatrix psd_jitter(const GramMatrix& gm);

/// First ladder value that makes entries + tau*I factorizable.
double find_psd_jitter(const Eigen::MatrixXd& entries, double gamma);

// Binary cache ("OGRM"): little-endian header {magic, version u32, n u64,
// gamma f64} followed by the n(n+1)/2 upper-triangle entries row-major as f64.

std::uint64_t gram_cache_key(const Eigen::MatrixXd& points, double gamma,
                             const SphereQuadrature& q);

void save_gram(const std::string& path, const GramMatrix& gm);

GramMatrix load_gram(const std::string& path);

}  // namespace obstacle_ridge
