#include "obstacle_ridge/oracle.hpp"

#include <cmath>
#include <numeric>

namespace obstacle_ridge {

namespace detail {

McEstimate mc_sphere_mean_impl(const Eigen::VectorXd& center, double radius,
                               const std::function<double(const Eigen::VectorXd&)>& h,
                               std::int64_t samples, std::uint64_t seed) {
  if (samples < 100) throw ParamError("mc_sphere_mean requires samples >= 100");
  const int d = static_cast<int>(center.size());

  std::vector<double> vals(static_cast<std::size_t>(samples));
  std::vector<double> sqs(static_cast<std::size_t>(samples));
  parallel_for(samples, [&](std::int64_t i) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd u(d);
    double norm_sq = 0.0;
    do {
      norm_sq = 0.0;
      for (int k = 0; k < d; ++k) {
        const double g = rng.normal();
        u[k] = g;
        norm_sq += g * g;
      }
    } while (norm_sq == 0.0);
    u *= radius / std::sqrt(norm_sq);
    const double v = h(center + u);
    vals[static_cast<std::size_t>(i)] = v;
    sqs[static_cast<std::size_t>(i)] = v * v;
  });

  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  const double n = static_cast<double>(samples);
  est.value = pairwise_sum(vals) / n;
  const double mean_sq = pairwise_sum(sqs) / n;
  const double variance =
      samples > 1 ? std::max(0.0, (mean_sq - est.value * est.value) * n / (n - 1.0))
                  : 0.0;
  est.std_error = std::sqrt(variance / n);
  return est;
}

}  // namespace detail

double harmonicity_residual(const GreenKernel& kernel, const Obstacle& o,
                            const ConstVecRef& y, double rho,
                            const SphereQuadrature& q) {
  if (rho < 0.0) throw ParamError("harmonicity_residual requires rho >= 0");
  const double separation = (y - o.center).norm();
  if (separation <= o.radius + rho) {
    throw GeometryError("test ball B(y, rho) must be disjoint from the obstacle");
  }
  if (rho == 0.0) return 0.0;
  const double gamma = o.threshold;
  Obstacle probe{y, gamma, rho};
  const double mean = capacitary_mean(probe, q, [&](const Eigen::VectorXd& p) {
    return std::min(kernel.eval(o.center, p), gamma);
  });
  const double value = std::min(kernel.eval(o.center, y), gamma);
  return std::abs(mean - value);
}

namespace {

RatioEstimate ratio_from_samples(const std::vector<double>& numerator_samples,
                                 double denominator) {
  RatioEstimate out;
  const double n = static_cast<double>(numerator_samples.size());
  const double mean = pairwise_sum(numerator_samples) / n;
  std::vector<double> sq(numerator_samples.size());
  for (std::size_t i = 0; i < numerator_samples.size(); ++i)
    sq[i] = numerator_samples[i] * numerator_samples[i];
  const double mean_sq = pairwise_sum(sq) / n;
  const double variance = std::max(0.0, (mean_sq - mean * mean) * n / (n - 1.0));
  out.value = mean / denominator;
  out.std_error = std::sqrt(variance / n) / denominator;
  return out;
}

}  // namespace

RatioEstimate poincare_ratio(const GreenKernel& kernel, const SyntheticTarget& g,
                             double gamma, const UniformCubeSampler& nu,
                             std::int64_t n_samples, const SphereQuadrature& q) {
  if (n_samples < 1000) throw ParamError("poincare_ratio requires N >= 1000");
  if (!(gamma > 0.0)) throw ParamError("poincare_ratio requires gamma > 0");
  if (g.energy <= 0.0) {
    return {0.0, 0.0, true};
  }
  std::vector<double> dev_sq(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, [&](std::int64_t i) {
    const Eigen::VectorXd x = nu.sample(i);
    const double dev =
        target_eval(kernel, g, x) - target_capacitary_mean(kernel, g, x, gamma, q);
    dev_sq[static_cast<std::size_t>(i)] = dev * dev;
  });
  return ratio_from_samples(dev_sq, g.energy);
}

RatioEstimate second_moment_ratio(const GreenKernel& kernel,
                                  const SyntheticTarget& g, double gamma,
                                  const UniformCubeSampler& nu,
                                  std::int64_t n_samples,
                                  const SphereQuadrature& q) {
  if (n_samples < 1000) throw ParamError("second_moment_ratio requires N >= 1000");
  if (!(gamma > 0.0)) throw ParamError("second_moment_ratio requires gamma > 0");
  const double beta = kernel.params().walk_exponent;
  const double alpha = kernel.params().dimension;

  std::vector<double> proj_sq(static_cast<std::size_t>(n_samples));
  std::vector<double> val_sq(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, [&](std::int64_t i) {
    const Eigen::VectorXd x = nu.sample(i);
    const double proj = target_capacitary_mean(kernel, g, x, gamma, q);
    const double val = target_eval(kernel, g, x);
    proj_sq[static_cast<std::size_t>(i)] = proj * proj;
    val_sq[static_cast<std::size_t>(i)] = val * val;
  });
  const double n = static_cast<double>(n_samples);
  const double l2_sq = pairwise_sum(val_sq) / n;
  const double denominator =
      std::pow(gamma, beta / (beta - alpha)) * g.energy + l2_sq;
  if (denominator <= 0.0) {
    return {0.0, 0.0, true};
  }
  return ratio_from_samples(proj_sq, denominator);
}

}  // namespace obstacle_ridge
