#include "obstacle_ridge/experiments.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "obstacle_ridge/oracle.hpp"
#include "obstacle_ridge/seeding.hpp"
#include "obstacle_ridge/threading.hpp"

namespace obstacle_ridge {

namespace {
constexpr std::uint64_t kCovariateStream = 0x636f76;  // "cov"
constexpr std::uint64_t kNoiseStream = 0x657073;      // "eps"
constexpr std::uint64_t kTestStream = 0x746573;       // "tes"
constexpr std::uint64_t kL2Stream = 0x6c32;           // "l2"
}  // namespace

SyntheticTarget synth_target(int dimension, int n_centers, double tau,
                             std::uint64_t seed, const SphereQuadrature& q) {
  if (n_centers < 1) throw ParamError("synth_target requires K >= 1");
  if (!(tau > 0.0)) throw ParamError("synth_target requires tau > 0");
  const EuclideanGreenKernel kernel(dimension);

  SyntheticTarget t;
  t.threshold = tau;
  t.centers.resize(n_centers, dimension);
  t.coeffs.resize(n_centers);
  CounterRng rng(derive_seed(seed, 0x7461726765ULL));
  for (int k = 0; k < n_centers; ++k) {
    for (int j = 0; j < dimension; ++j) t.centers(k, j) = rng.uniform(0.2, 0.8);
    t.coeffs[k] = rng.uniform(-1.0, 1.0);
  }
  const GramMatrix gm = assemble_gram(kernel, t.centers, tau, q);
  t.energy = std::max(0.0, t.coeffs.dot(gm.entries * t.coeffs));
  return t;
}

Dataset sample_dataset(const SyntheticTarget& target, std::int64_t n, double rho,
                       std::uint64_t seed) {
  if (n < 1) throw ParamError("sample_dataset requires n >= 1");
  if (rho < 0.0) throw ParamError("sample_dataset requires rho >= 0");
  const int d = static_cast<int>(target.centers.cols());
  const EuclideanGreenKernel kernel(d);

  Dataset ds;
  ds.x.resize(n, d);
  ds.y.resize(n);
  parallel_for(n, [&](std::int64_t i) {
    CounterRng xs(derive_seed(seed, kCovariateStream, static_cast<std::uint64_t>(i)));
    for (int j = 0; j < d; ++j) ds.x(i, j) = xs.uniform01();
    CounterRng es(derive_seed(seed, kNoiseStream, static_cast<std::uint64_t>(i)));
    ds.y[i] = target_eval(kernel, target, ds.x.row(i).transpose()) +
              rho * es.normal();
  });
  return ds;
}

double mse_estimate(const FittedModel& m, const SyntheticTarget& target,
                    std::int64_t n_test, std::uint64_t seed) {
  if (n_test < 1000) throw ParamError("mse_estimate requires N_test >= 1000");
  const int d = m.space.dimension;
  const EuclideanGreenKernel kernel(d);
  std::vector<double> sq(static_cast<std::size_t>(n_test));
  parallel_for(n_test, [&](std::int64_t i) {
    CounterRng rng(derive_seed(seed, kTestStream, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.uniform01();
    const double diff = predict(m, x) - target_eval(kernel, target, x);
    sq[static_cast<std::size_t>(i)] = diff * diff;
  });
  return pairwise_sum(sq) / static_cast<double>(n_test);
}

std::pair<double, double> fit_slope(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ShapeError("fit_slope needs two equally long series of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
  }
  if (sxx == 0.0) throw ParamError("fit_slope needs at least two distinct x values");
  const double slope = sxy / sxx;
  if (x.size() == 2) return {slope, 0.0};
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - mean_y - slope * (x[i] - mean_x);
    rss += r * r;
  }
  const double stderr_slope = std::sqrt(rss / (n - 2.0) / sxx);
  return {slope, stderr_slope};
}

RateStudyResult run_rate_study(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw ParamError("rate study requires a non-empty n grid");
  for (std::size_t i = 1; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
      throw ParamError("rate study n grid must be strictly increasing");
    }
  }
  if (cfg.seeds.empty()) throw ParamError("rate study requires at least one seed");
  if (cfg.noise_sd < 0.0) throw ParamError("noise_sd must be >= 0");

  const SphereQuadrature q =
      sphere_quadrature(cfg.dimension, cfg.quad_level,
                        derive_seed(cfg.target_seed, 0x71756164ULL));
  const SyntheticTarget target = synth_target(
      cfg.dimension, cfg.target_centers, cfg.target_tau, cfg.target_seed, q);
  const double radius = cfg.erm_radius_factor * std::sqrt(target.energy);

  Schedule schedule;
  schedule.gamma0 = cfg.gamma0;
  schedule.lambda0 = cfg.lambda0;
  schedule.mode = cfg.mode;
  schedule.dimension = cfg.dimension;
  schedule.linked = cfg.linked;
  schedule.kappa = cfg.kappa;

  RateStudyResult result;
  result.target_energy = target.energy;
  result.cells.reserve(cfg.n_grid.size() * cfg.seeds.size());

  for (std::int64_t n : cfg.n_grid) {
    for (std::uint64_t seed : cfg.seeds) {
      const auto t0 = std::chrono::steady_clock::now();
      RateCell cell;
      cell.n = n;
      cell.seed = seed;
      try {
        const auto [gamma, lambda] = schedule_params(schedule, n);
        cell.gamma = gamma;
        const Dataset ds = sample_dataset(target, n, cfg.noise_sd,
                                          derive_seed(seed, static_cast<std::uint64_t>(n)));
        FittedModel model;
        if (cfg.mode == ScheduleMode::erm) {
          model = erm_fit(ds, gamma, radius, q);
        } else {
          model = fit(ds, gamma, lambda, q);
        }
        cell.lambda = model.lambda;
        cell.mse = mse_estimate(model, target, cfg.test_size,
                                derive_seed(seed, static_cast<std::uint64_t>(n), 0x74ULL));
      } catch (const std::exception& e) {
        throw Error("rate study cell (n=" + std::to_string(n) +
                    ", seed=" + std::to_string(seed) + ") failed: " + e.what());
      }
      const auto t1 = std::chrono::steady_clock::now();
      cell.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      result.cells.push_back(cell);
    }
  }

  const std::size_t n_seeds = cfg.seeds.size();
  std::vector<double> log_n;
  std::vector<double> log_mean;
  for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
    double mean = 0.0;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      mean += result.cells[gi * n_seeds + si].mse;
    }
    mean /= static_cast<double>(n_seeds);
    result.mean_mse.push_back(mean);
    log_n.push_back(std::log(static_cast<double>(cfg.n_grid[gi])));
    log_mean.push_back(std::log(mean));
  }
  if (cfg.n_grid.size() >= 2) {
    const auto [slope, se] = fit_slope(log_n, log_mean);
    result.slope = slope;
    result.slope_stderr = se;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      std::vector<double> log_mse;
      for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        log_mse.push_back(std::log(result.cells[gi * n_seeds + si].mse));
      }
      result.per_seed_slopes.push_back(fit_slope(log_n, log_mse).first);
    }
  }
  return result;
}

namespace {

// E_b = int_{B(0,1)} ||grad b||^2 for b(r) = (1 - r^2)^2 by composite Simpson
// on the radial profile 16 r^2 (1 - r^2)^2 S_{d-1} r^{d-1}.
double bump_energy_constant(int dimension) {
  const double half_d = 0.5 * dimension;
  const double surface =
      2.0 * std::pow(3.141592653589793238462643, half_d) / std::tgamma(half_d);
  const auto integrand = [&](double r) {
    const double one_m = 1.0 - r * r;
    return 16.0 * r * r * one_m * one_m * surface * std::pow(r, dimension - 1);
  };
  const int panels = 1 << 14;
  const double h = 1.0 / panels;
  double acc = integrand(0.0) + integrand(1.0);
  for (int i = 1; i < panels; ++i) acc += 2.0 * (1 + (i & 1)) * integrand(i * h);
  return acc * h / 3.0;
}

double bump_profile(double r) {
  if (r >= 1.0) return 0.0;
  const double one_m = 1.0 - r * r;
  return one_m * one_m;
}

}  // namespace

IllposedResult illposed_demo(int dimension, const std::vector<double>& widths,
                             std::uint64_t seed) {
  if (dimension < 3) throw DimensionError("illposed_demo requires d >= 3");
  if (widths.empty()) throw ParamError("illposed_demo requires a width grid");
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (!(widths[i] > 0.0)) throw ParamError("widths must be positive");
    if (i > 0 && widths[i] >= widths[i - 1]) {
      throw ParamError("widths must be strictly decreasing");
    }
  }

  constexpr int kPoints = 10;
  IllposedResult res;
  res.points.resize(kPoints, dimension);
  res.responses.resize(kPoints);
  CounterRng rng(derive_seed(seed, 0x696c6cULL));
  for (int i = 0; i < kPoints; ++i) {
    for (int j = 0; j < dimension; ++j) res.points(i, j) = rng.uniform01();
    res.responses[i] = rng.uniform(-1.0, 1.0);
  }

  double min_sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kPoints; ++i) {
    for (int j = i + 1; j < kPoints; ++j) {
      min_sep = std::min(min_sep, (res.points.row(i) - res.points.row(j)).norm());
    }
  }
  res.min_separation = min_sep;
  for (double h : widths) {
    if (h >= 0.5 * min_sep) {
      throw GeometryError(
          "bump width " + std::to_string(h) + " reaches half the minimum point "
          "separation " + std::to_string(min_sep) + "; bumps would overlap");
    }
  }

  res.bump_energy_constant = bump_energy_constant(dimension);
  const double response_sq = res.responses.squaredNorm();

  const auto g_h = [&](const Eigen::VectorXd& x, double h) {
    double acc = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double r = (x - res.points.row(i).transpose()).norm() / h;
      if (r < 1.0) acc += res.responses[i] * bump_profile(r);
    }
    return acc;
  };

  constexpr std::int64_t kL2Samples = 20000;
  // Common test points across the width grid: the per-point contribution is
  // monotone in h, so the L2 estimates decrease monotonically along the grid.
  Eigen::MatrixXd l2_points(kL2Samples, dimension);
  for (std::int64_t i = 0; i < kL2Samples; ++i) {
    CounterRng prng(derive_seed(seed, kL2Stream, static_cast<std::uint64_t>(i)));
    for (int j = 0; j < dimension; ++j) l2_points(i, j) = prng.uniform01();
  }

  for (double h : widths) {
    IllposedRow row;
    row.width = h;
    for (int i = 0; i < kPoints; ++i) {
      row.max_interp_error =
          std::max(row.max_interp_error,
                   std::abs(g_h(res.points.row(i).transpose(), h) - res.responses[i]));
    }
    row.energy = response_sq * std::pow(h, dimension - 2) * res.bump_energy_constant;
    std::vector<double> sq(static_cast<std::size_t>(kL2Samples));
    parallel_for(kL2Samples, [&](std::int64_t i) {
      const double v = g_h(l2_points.row(i).transpose(), h);
      sq[static_cast<std::size_t>(i)] = v * v;
    });
    row.l2_norm_sq = pairwise_sum(sq) / static_cast<double>(kL2Samples);
    res.rows.push_back(row);
  }

  std::vector<double> log_h;
  std::vector<double> log_e;
  for (const auto& row : res.rows) {
    log_h.push_back(std::log(row.width));
    log_e.push_back(std::log(row.energy));
  }
  if (res.rows.size() >= 2) res.energy_exponent = fit_slope(log_h, log_e).first;
  return res;
}

}  // namespace obstacle_ridge
