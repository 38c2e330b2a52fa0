#include <doctest.h>

#include <cmath>

#include "obstacle_ridge/experiments.hpp"
#include "obstacle_ridge/oracle.hpp"

using namespace obstacle_ridge;

namespace {
Eigen::VectorXd vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}
}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("mc_sphere_mean basics") {
  const Eigen::VectorXd center = vec3(0.2, 0.4, 0.6);
  const McEstimate one = mc_sphere_mean(
      center, 0.5, [](const Eigen::VectorXd&) { return 1.0; }, 1000, 9);
  CHECK(one.value == 1.0);
  CHECK(one.std_error == 0.0);

  EuclideanGreenKernel k(3);
  const Eigen::VectorXd z = vec3(2.0, 0.4, 0.6);
  const double gamma = 1.0;
  const auto h = [&](const Eigen::VectorXd& y) {
    return truncated_eval(k, z, y, gamma);
  };
  const McEstimate mc = mc_sphere_mean(center, 0.5, h, 200000, 17);
  const double exact = green_eval(k, z, center);
  CHECK(std::abs(mc.value - exact) <= 4.0 * mc.std_error);

  const McEstimate again = mc_sphere_mean(center, 0.5, h, 200000, 17);
  CHECK(again.value == mc.value);
  CHECK(again.std_error == mc.std_error);

  CHECK_THROWS_AS(mc_sphere_mean(center, 0.5, h, 50, 17), ParamError);
}

TEST_CASE("mc estimates are identical across worker counts") {
  const Eigen::VectorXd center = vec3(0.0, 0.0, 0.0);
  EuclideanGreenKernel k(3);
  const auto h = [&](const Eigen::VectorXd& y) {
    return truncated_eval(k, vec3(1.2, 0, 0), y, 2.0);
  };
  const int old_workers = worker_count();
  set_worker_count(1);
  const McEstimate serial = mc_sphere_mean(center, 0.4, h, 50000, 23);
  set_worker_count(4);
  const McEstimate threaded = mc_sphere_mean(center, 0.4, h, 50000, 23);
  set_worker_count(old_workers);
  CHECK(serial.value == threaded.value);
  CHECK(serial.std_error == threaded.std_error);
}

TEST_CASE("harmonicity_residual") {
  EuclideanGreenKernel k(3);
  const SphereQuadrature q = sphere_quadrature(3, 3);
  const Obstacle o = make_obstacle(k, vec3(0, 0, 0), k.eval_at_distance(1.0));
  REQUIRE(o.radius == doctest::Approx(1.0));

  const Eigen::VectorXd y = vec3(3.0, 0, 0);
  const double residual = harmonicity_residual(k, o, y, 0.5, q);
  const double value = std::min(k.eval(o.center, y), o.threshold);
  CHECK(residual <= 1e-8 * value);

  CHECK(harmonicity_residual(k, o, y, 0.0, q) == 0.0);
  CHECK_THROWS_AS(harmonicity_residual(k, o, vec3(0.5, 0, 0), 0.1, q),
                  GeometryError);
  CHECK_THROWS_AS(harmonicity_residual(k, o, vec3(1.2, 0, 0), 0.5, q),
                  GeometryError);
}

TEST_CASE("poincare_ratio scaling and degeneracy") {
  EuclideanGreenKernel k(3);
  const SphereQuadrature q = sphere_quadrature(3, 3);
  const SyntheticTarget g = synth_target(3, 3, 2.0, 41, q);
  const UniformCubeSampler nu{3, 1234};

  SyntheticTarget zero = g;
  zero.coeffs.setZero();
  zero.energy = 0.0;
  const RatioEstimate degenerate = poincare_ratio(k, zero, 1.0, nu, 2000, q);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.value == 0.0);

  const RatioEstimate at1 = poincare_ratio(k, g, 1.0, nu, 4000, q);
  const RatioEstimate at2 = poincare_ratio(k, g, 2.0, nu, 4000, q);
  const RatioEstimate at4 = poincare_ratio(k, g, 4.0, nu, 4000, q);
  CHECK(at1.value > 0.0);
  CHECK(at2.value < at1.value);
  CHECK(at4.value < at2.value);

  // Seed stability within five combined standard errors.
  const UniformCubeSampler nu_b{3, 99};
  const RatioEstimate other = poincare_ratio(k, g, 2.0, nu_b, 4000, q);
  const double combined =
      std::sqrt(at2.std_error * at2.std_error + other.std_error * other.std_error);
  CHECK(std::abs(at2.value - other.value) <= 5.0 * combined);

  CHECK_THROWS_AS(poincare_ratio(k, g, 1.0, nu, 100, q), ParamError);
}

TEST_CASE("second_moment_ratio bounded and degenerate cases") {
  EuclideanGreenKernel k(3);
  const SphereQuadrature q = sphere_quadrature(3, 3);
  const SyntheticTarget g = synth_target(3, 3, 2.0, 43, q);
  const UniformCubeSampler nu{3, 77};

  SyntheticTarget zero = g;
  zero.coeffs.setZero();
  zero.energy = 0.0;
  CHECK(second_moment_ratio(k, zero, 1.0, nu, 2000, q).value == 0.0);

  double previous = std::numeric_limits<double>::infinity();
  for (double gamma : {1.0, 2.0, 4.0, 8.0}) {
    const RatioEstimate est = second_moment_ratio(k, g, gamma, nu, 4000, q);
    CHECK(std::isfinite(est.value));
    CHECK(est.value > 0.0);
    CHECK(est.value <= 4.0);
    previous = est.value;
  }
}

TEST_CASE("check suite passes end to end") {
  CheckConfig cfg;
  cfg.seed = 1;
  cfg.quad_level = 3;
  cfg.mc_samples = 20000;
  cfg.poincare_samples = 2000;
  cfg.poincare_seeds = 2;
  const auto results = run_check_suite(cfg);
  CHECK(results.size() == 9);
  for (const auto& r : results) {
    INFO(r.name, " measured=", r.measured, " bound=", r.bound);
    CHECK(r.pass);
  }
}

}  // TEST_SUITE
