#pragma once

#include <Eigen/Core>
#include <functional>

#include "obstacle_ridge/errors.hpp"

namespace obstacle_ridge {

using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;

/// Structural constants of a transient Dirichlet space: ambient dimension
/// (volume exponent alpha = d), walk exponent beta, and the Green-function
/// normalization constant.
struct SpaceParams {
  int dimension = 3;
  double walk_exponent = 2.0;
  double green_constant = 0.0;
};

/// Normalization constant c(d) = Gamma(d/2 - 1) / (2 pi^{d/2}) of the
/// free-space Green function on R^d. Throws DimensionError for d < 3.
double green_constant(int dimension);

/// Green-function evaluator plus the level-set geometry it induces. Concrete
/// spaces implement eval() and level_radius(); everything downstream (obstacles,
/// Gram assembly, the estimator) is written against this interface.
class GreenKernel {
 public:
  virtual ~GreenKernel() = default;

  const SpaceParams& params() const { return params_; }
  int dimension() const { return params_.dimension; }

  /// G(x, y). Must be symmetric, positive, and +inf on the diagonal.
  virtual double eval(const ConstVecRef& x, const ConstVecRef& y) const = 0;

  /// Radius of the super-level set {y : G(x, y) >= gamma} around any x.
  virtual double level_radius(double gamma) const = 0;

 protected:
  explicit GreenKernel(SpaceParams params) : params_(params) {}
  SpaceParams params_;
};

/// G(x, y) = c(d) ||x - y||^{2-d} on R^d, d >= 3.
class EuclideanGreenKernel final : public GreenKernel {
 public:
  explicit EuclideanGreenKernel(int dimension);

  double eval(const ConstVecRef& x, const ConstVecRef& y) const override;
  double level_radius(double gamma) const override;

  /// Radial profile c(d) r^{2-d}; +inf at r = 0.
  double eval_at_distance(double r) const;
};

/// Solves profile(r) = gamma by bisection for kernels without a closed-form
/// level radius. profile must be continuous and strictly decreasing on
/// [r_lo, r_hi] with profile(r_lo) >= gamma >= profile(r_hi).
double level_radius_by_bisection(const std::function<double(double)>& profile,
                                 double gamma, double r_lo, double r_hi,
                                 double rel_tol = 1e-14);

// Checked free-function entry points.

double green_eval(const GreenKernel& kernel, const ConstVecRef& x,
                  const ConstVecRef& y);

double level_radius(const GreenKernel& kernel, double gamma);

/// min(G(x, y), gamma); finite everywhere, equal to gamma on the obstacle.
double truncated_eval(const GreenKernel& kernel, const ConstVecRef& x,
                      const ConstVecRef& y, double gamma);

}  // namespace obstacle_ridge
