#include "obstacle_ridge/kernel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace obstacle_ridge {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

void check_same_dimension(const ConstVecRef& x, const ConstVecRef& y, int d) {
  if (x.size() != d || y.size() != d) {
    throw ShapeError("point dimension mismatch: expected " + std::to_string(d) +
                     ", got " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
}
}  // namespace

double green_constant(int dimension) {
  if (dimension < 3) {
    throw DimensionError("green_constant requires d >= 3 (transience), got d = " +
                         std::to_string(dimension));
  }
  const double half_d = 0.5 * dimension;
  return std::tgamma(half_d - 1.0) / (2.0 * std::pow(kPi, half_d));
}

EuclideanGreenKernel::EuclideanGreenKernel(int dimension)
    : GreenKernel({dimension, 2.0, green_constant(dimension)}) {}

double EuclideanGreenKernel::eval_at_distance(double r) const {
  if (r <= 0.0) return std::numeric_limits<double>::infinity();
  const int d = params_.dimension;
  const double c = params_.green_constant;
  switch (d) {
    case 3:
      return c / r;
    case 4:
      return c / (r * r);
    default:
      return c * std::pow(r, 2.0 - d);
  }
}

double EuclideanGreenKernel::eval(const ConstVecRef& x, const ConstVecRef& y) const {
  return eval_at_distance((x - y).norm());
}

double EuclideanGreenKernel::level_radius(double gamma) const {
  const int d = params_.dimension;
  const double c = params_.green_constant;
  switch (d) {
    case 3:
      return c / gamma;
    case 4:
      return std::sqrt(c / gamma);
    default:
      return std::pow(gamma / c, -1.0 / (d - 2));
  }
}

double level_radius_by_bisection(const std::function<double(double)>& profile,
                                 double gamma, double r_lo, double r_hi,
                                 double rel_tol) {
  if (gamma <= 0.0) throw ParamError("level radius requires gamma > 0");
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) {
    throw ParamError("bisection bracket must satisfy 0 < r_lo < r_hi");
  }
  double f_lo = profile(r_lo);
  double f_hi = profile(r_hi);
  if (f_lo < gamma || f_hi > gamma) {
    throw ParamError("bisection bracket does not enclose the level gamma");
  }
  while ((r_hi - r_lo) > rel_tol * r_hi) {
    const double mid = 0.5 * (r_lo + r_hi);
    if (profile(mid) >= gamma) {
      r_lo = mid;
    } else {
      r_hi = mid;
    }
  }
  return 0.5 * (r_lo + r_hi);
}

double green_eval(const GreenKernel& kernel, const ConstVecRef& x,
                  const ConstVecRef& y) {
  check_same_dimension(x, y, kernel.dimension());
  return kernel.eval(x, y);
}

double level_radius(const GreenKernel& kernel, double gamma) {
  if (!(gamma > 0.0)) throw ParamError("level_radius requires gamma > 0");
  return kernel.level_radius(gamma);
}

double truncated_eval(const GreenKernel& kernel, const ConstVecRef& x,
                      const ConstVecRef& y, double gamma) {
  if (!(gamma > 0.0)) throw ParamError("truncated_eval requires gamma > 0");
  check_same_dimension(x, y, kernel.dimension());
  return std::min(kernel.eval(x, y), gamma);
}

}  // namespace obstacle_ridge
