#include <algorithm>
#include <cmath>

#include "obstacle_ridge/experiments.hpp"
#include "obstacle_ridge/oracle.hpp"

namespace obstacle_ridge {

namespace {

CheckResult agreement_check(const CheckConfig& cfg) {
  const EuclideanGreenKernel kernel(3);
  const SphereQuadrature q = sphere_quadrature(3, cfg.quad_level);
  double worst = 0.0;
  std::string detail;
  for (int case_id = 0; case_id < 100; ++case_id) {
    CounterRng rng(derive_seed(cfg.seed, 0xa6, case_id));
    Eigen::VectorXd center(3), z(3), a(3);
    for (int j = 0; j < 3; ++j) {
      center[j] = rng.uniform01();
      z[j] = rng.uniform01();
      a[j] = rng.uniform(-1.0, 1.0);
    }
    const double gamma = rng.uniform(0.5, 4.0);
    const double tau_h = rng.uniform(0.5, 4.0);
    const double b = rng.uniform(-1.0, 1.0);
    const Obstacle o = make_obstacle(kernel, center, gamma);
    const auto h = [&](const Eigen::VectorXd& y) {
      return std::min(kernel.eval(z, y), tau_h) + a.dot(y) + b;
    };
    const double det = capacitary_mean(o, q, h);
    const McEstimate mc = mc_sphere_mean(center, o.radius, h, cfg.mc_samples,
                                         derive_seed(cfg.seed, 0xac, case_id));
    const double band = 4.0 * mc.std_error + 1e-12;
    worst = std::max(worst, std::abs(det - mc.value) / band);
  }
  return {"quadrature_vs_mc_agreement", worst, 1.0, worst <= 1.0,
          "max |det - mc| / (4 SE) over 100 cases"};
}

CheckResult harmonicity_check(const CheckConfig& cfg) {
  const EuclideanGreenKernel kernel(3);
  const SphereQuadrature q = sphere_quadrature(3, cfg.quad_level);
  double worst = 0.0;
  for (int case_id = 0; case_id < 100; ++case_id) {
    CounterRng rng(derive_seed(cfg.seed, 0x4a, case_id));
    const double radius = rng.uniform(0.5, 1.5);
    const double gamma = kernel.eval_at_distance(radius);
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform(-1.0, 1.0);
    const Obstacle o = make_obstacle(kernel, x, gamma);
    const double rho = rng.uniform(0.3, 0.7) * radius;
    const double sep = rng.uniform(1.3, 3.0) * (radius + rho);
    Eigen::VectorXd dir(3);
    double norm = 0.0;
    for (int j = 0; j < 3; ++j) {
      dir[j] = rng.normal();
      norm += dir[j] * dir[j];
    }
    const Eigen::VectorXd y = x + dir * (sep / std::sqrt(norm));
    const double residual = harmonicity_residual(kernel, o, y, rho, q);
    const double value = std::min(kernel.eval(x, y), gamma);
    worst = std::max(worst, residual / value);
  }
  return {"harmonicity_residual", worst, 1e-8, worst <= 1e-8,
          "max relative mean-value residual over 100 admissible geometries"};
}

CheckResult potential_closed_form_check(const CheckConfig& cfg) {
  double worst = 0.0;
  for (int d : {3, 4, 5}) {
    const EuclideanGreenKernel kernel(d);
    for (int case_id = 0; case_id < 200; ++case_id) {
      CounterRng rng(derive_seed(cfg.seed, 0xef, d, case_id));
      Eigen::VectorXd x(d), y(d);
      for (int j = 0; j < d; ++j) {
        x[j] = rng.uniform(-1.0, 1.0);
        y[j] = rng.uniform(-1.0, 1.0);
      }
      const double gamma = rng.uniform(0.25, 8.0);
      const Obstacle o = make_obstacle(kernel, x, gamma);
      const double r = (y - x).norm();
      if (r == 0.0) continue;
      const double expected = std::min(std::pow(o.radius / r, d - 2.0), 1.0);
      const double got = equilibrium_potential(kernel, o, y);
      worst = std::max(worst, std::abs(got - expected) / expected);
    }
  }
  return {"equilibrium_potential_closed_form", worst, 1e-12, worst <= 1e-12,
          "max relative error vs (R/r)^{d-2} ^ 1 for d in {3,4,5}"};
}

CheckResult mean_of_one_check(const CheckConfig& cfg) {
  const EuclideanGreenKernel kernel(3);
  const SphereQuadrature q = sphere_quadrature(3, cfg.quad_level);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.25);
  const Obstacle o = make_obstacle(kernel, x, 2.0);
  const double mean = capacitary_mean(o, q, [](const Eigen::VectorXd&) { return 1.0; });
  const double err = std::abs(mean - 1.0);
  return {"capacitary_mean_normalization", err, 1e-14, err <= 1e-14,
          "|mean of h = 1 minus 1|"};
}

CheckResult capacity_identity_check(const CheckConfig& cfg) {
  const EuclideanGreenKernel kernel(3);
  const SphereQuadrature q = sphere_quadrature(3, cfg.quad_level);
  double worst = 0.0;
  for (int case_id = 0; case_id < 50; ++case_id) {
    CounterRng rng(derive_seed(cfg.seed, 0xca, case_id));
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform(-1.0, 1.0);
    const double gamma = rng.uniform(0.25, 8.0);
    const Obstacle o = make_obstacle(kernel, x, gamma);
    const double mean = capacitary_mean(o, q, [&](const Eigen::VectorXd& y) {
      return std::min(kernel.eval(x, y), gamma);
    });
    worst = std::max(worst, std::abs(mean - gamma) / gamma);
  }
  return {"capacity_identity", worst, 1e-10, worst <= 1e-10,
          "max relative error of the boundary mean of gamma e_x vs gamma"};
}

SyntheticTarget check_target(const CheckConfig& cfg, const SphereQuadrature& q) {
  return synth_target(3, 3, 2.0, derive_seed(cfg.seed, 0x747274ULL), q);
}

std::vector<double> poincare_grid(const CheckConfig& cfg) {
  return {cfg.poincare_gamma_base, 2.0 * cfg.poincare_gamma_base,
          4.0 * cfg.poincare_gamma_base, 8.0 * cfg.poincare_gamma_base};
}

CheckResult poincare_scaling_check(const CheckConfig& cfg) {
  const EuclideanGreenKernel kernel(3);
  const SphereQuadrature q = sphere_quadrature(3, cfg.quad_level);
  const SyntheticTarget g = check_target(cfg, q);
  const std::vector<double> grid = poincare_grid(cfg);

  std::vector<double> log_gamma;
  std::vector<double> log_ratio;
  bool all_positive = true;
  for (double gamma : grid) {
    double mean_ratio = 0.0;
    for (int s = 0; s < cfg.poincare_seeds; ++s) {
      const UniformCubeSampler nu{3, derive_seed(cfg.seed, 0x7075, s)};
      const RatioEstimate est =
          poincare_ratio(kernel, g, gamma, nu, cfg.poincare_samples, q);
      mean_ratio += est.value;
    }
    mean_ratio /= cfg.poincare_seeds;
    if (!(mean_ratio > 0.0) || !std::isfinite(mean_ratio)) all_positive = false;
    log_gamma.push_back(std::log(gamma));
    log_ratio.push_back(std::log(mean_ratio));
  }
  double slope = 0.0;
  if (all_positive) slope = fit_slope(log_gamma, log_ratio).first;
  const bool pass = all_positive && slope <= -1.7;
  return {"poincare_scaling_slope", slope, -1.7, pass,
          all_positive ? "log-log slope of the Poincare ratio over the gamma grid"
                       : "ratio not finite/positive at some grid point"};
}

CheckResult second_moment_check(const CheckConfig& cfg) {
  const EuclideanGreenKernel kernel(3);
  const SphereQuadrature q = sphere_quadrature(3, cfg.quad_level);
  const SyntheticTarget g = check_target(cfg, q);
  double worst = 0.0;
  for (double gamma : poincare_grid(cfg)) {
    const UniformCubeSampler nu{3, derive_seed(cfg.seed, 0x736dULL)};
    const RatioEstimate est =
        second_moment_ratio(kernel, g, gamma, nu, cfg.poincare_samples, q);
    worst = std::max(worst, est.value);
  }
  return {"second_moment_bounded", worst, 4.0, worst <= 4.0,
          "max second-moment ratio over the gamma grid"};
}

CheckResult seed_stability_check(const CheckConfig& cfg) {
  const EuclideanGreenKernel kernel(3);
  const SphereQuadrature q = sphere_quadrature(3, cfg.quad_level);
  const SyntheticTarget g = check_target(cfg, q);
  const double gamma = 2.0 * cfg.poincare_gamma_base;
  const UniformCubeSampler nu_a{3, derive_seed(cfg.seed, 0x5331ULL)};
  const UniformCubeSampler nu_b{3, derive_seed(cfg.seed, 0x5332ULL)};
  const RatioEstimate a = poincare_ratio(kernel, g, gamma, nu_a, cfg.poincare_samples, q);
  const RatioEstimate b = poincare_ratio(kernel, g, gamma, nu_b, cfg.poincare_samples, q);
  const double combined = std::sqrt(a.std_error * a.std_error +
                                    b.std_error * b.std_error) + 1e-300;
  const double pulls = std::abs(a.value - b.value) / combined;
  return {"poincare_seed_stability", pulls, 5.0, pulls <= 5.0,
          "|ratio(seed A) - ratio(seed B)| in combined standard errors"};
}

CheckResult reproducibility_check(const CheckConfig& cfg) {
  const EuclideanGreenKernel kernel(3);
  Eigen::VectorXd z = Eigen::VectorXd::Constant(3, 0.1);
  Eigen::VectorXd center = Eigen::VectorXd::Constant(3, 0.6);
  const auto h = [&](const Eigen::VectorXd& y) {
    return std::min(kernel.eval(z, y), 3.0);
  };
  const int old_workers = worker_count();
  set_worker_count(1);
  const McEstimate serial =
      mc_sphere_mean(center, 0.35, h, cfg.mc_samples, derive_seed(cfg.seed, 0xbb));
  set_worker_count(3);
  const McEstimate threaded =
      mc_sphere_mean(center, 0.35, h, cfg.mc_samples, derive_seed(cfg.seed, 0xbb));
  set_worker_count(old_workers);
  const bool identical = serial.value == threaded.value &&
                         serial.std_error == threaded.std_error;
  return {"mc_worker_reproducibility", identical ? 0.0 : 1.0, 0.0, identical,
          "bitwise difference between 1-worker and 3-worker estimates"};
}

}  // namespace

std::vector<CheckResult> run_check_suite(const CheckConfig& cfg) {
  std::vector<CheckResult> results;
  results.push_back(agreement_check(cfg));
  results.push_back(harmonicity_check(cfg));
  results.push_back(potential_closed_form_check(cfg));
  results.push_back(mean_of_one_check(cfg));
  results.push_back(capacity_identity_check(cfg));
  results.push_back(poincare_scaling_check(cfg));
  results.push_back(second_moment_check(cfg));
  results.push_back(seed_stability_check(cfg));
  results.push_back(reproducibility_check(cfg));
  return results;
}

}  // namespace obstacle_ridge
