// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code 0 iff all pass.
//
// Usage: acceptance_tests [--cli <path-to-cli-binary>] [--only N[,M...]]

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "obstacle_ridge/csv.hpp"
#include "obstacle_ridge/experiments.hpp"
#include "obstacle_ridge/oracle.hpp"

namespace or_ = obstacle_ridge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Reference experiment configuration (free constants of the studies).
constexpr double kTargetTau = 4.0;
constexpr std::uint64_t kTargetSeed = 7;
constexpr int kTargetK = 5;
constexpr double kNoiseSd = 0.5;
constexpr double kRidgeGamma0 = 1.0;
constexpr double kRidgeLambda0 = 0.02;
constexpr double kErmGamma0 = 1.0;
constexpr int kQuadLevel = 3;
const std::vector<std::int64_t> kNGrid = {256, 512, 1024, 2048, 4096};
const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5};

struct CriterionOutcome {
  int id;
  std::string name;
  bool pass;
  double seconds;
  std::string detail;
};

std::vector<CriterionOutcome> g_outcomes;
std::string g_cli_path;
or_::RateStudyResult g_ridge_result;
bool g_have_ridge = false;

void record(int id, const std::string& name, bool pass, double seconds,
            const std::string& detail) {
  g_outcomes.push_back({id, name, pass, seconds, detail});
  std::printf("[%s] criterion %d: %s (%.1fs) %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), seconds, detail.c_str());
  std::fflush(stdout);
}

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

or_::ExperimentConfig reference_config(or_::ScheduleMode mode) {
  or_::ExperimentConfig cfg;
  cfg.dimension = 3;
  cfg.n_grid = kNGrid;
  cfg.seeds = kSeeds;
  cfg.gamma0 = mode == or_::ScheduleMode::erm ? kErmGamma0 : kRidgeGamma0;
  cfg.lambda0 = kRidgeLambda0;
  cfg.mode = mode;
  cfg.noise_sd = kNoiseSd;
  cfg.test_size = 4096;
  cfg.quad_level = kQuadLevel;
  cfg.target_centers = kTargetK;
  cfg.target_tau = kTargetTau;
  cfg.target_seed = kTargetSeed;
  cfg.erm_radius_factor = 2.0;
  return cfg;
}

// 1. Gram correctness: exact diagonal; fast path vs quadrature path within
//    1e-6 relative on 1000 random separated pairs (d = 3, level 2); < 10 s.
void criterion1() {
  const auto start = Clock::now();
  const or_::EuclideanGreenKernel kernel(3);
  const or_::SphereQuadrature q2 = or_::sphere_quadrature(3, 2);
  const double gamma = 2.0;
  const double radius = kernel.level_radius(gamma);

  bool diagonal_exact = true;
  {
    or_::CounterRng rng(or_::derive_seed(501, 0));
    Eigen::MatrixXd pts(24, 3);
    for (int i = 0; i < 24; ++i)
      for (int j = 0; j < 3; ++j) pts(i, j) = rng.uniform01();
    const or_::GramMatrix gm = or_::assemble_gram(kernel, pts, gamma, q2);
    for (Eigen::Index i = 0; i < gm.size(); ++i) {
      diagonal_exact = diagonal_exact && gm.entries(i, i) == gamma;
    }
  }

  double worst = 0.0;
  int accepted = 0;
  std::uint64_t attempt = 0;
  while (accepted < 1000) {
    or_::CounterRng rng(or_::derive_seed(502, attempt++));
    Eigen::VectorXd a(3), b(3);
    for (int j = 0; j < 3; ++j) {
      a[j] = rng.uniform01();
      b[j] = rng.uniform01();
    }
    if ((a - b).norm() < 2.0 * radius * (1.0 + 1e-9)) continue;
    ++accepted;
    const double fast = or_::gram_entry(kernel, a, b, gamma, q2);
    const double quad = or_::gram_entry_quadrature(kernel, a, b, gamma, q2);
    worst = std::max(worst, std::abs(fast - quad) / fast);
  }

  const double secs = elapsed(start);
  const bool pass = diagonal_exact && worst <= 1e-6 && secs < 10.0;
  std::ostringstream detail;
  detail << "diag_exact=" << (diagonal_exact ? "yes" : "no")
         << " max_rel_gap=" << worst;
  record(1, "gram fast path vs quadrature", pass, secs, detail.str());
}

// 2. Representer identities at n = 512: residual <= 1e-8 ||y||, 100-direction
//    minimality with 1e-12 slack, training means equal (G c)_i within
//    1e-8 gamma; < 30 s.
void criterion2() {
  const auto start = Clock::now();
  const or_::SphereQuadrature q = or_::sphere_quadrature(3, kQuadLevel);
  const or_::SyntheticTarget target =
      or_::synth_target(3, kTargetK, kTargetTau, kTargetSeed, q);
  const std::int64_t n = 512;
  const or_::Dataset ds =
      or_::sample_dataset(target, n, kNoiseSd, or_::derive_seed(503, 0));

  or_::Schedule schedule{kRidgeGamma0, kRidgeLambda0, or_::ScheduleMode::ridge, 3};
  const auto [gamma, lambda] = or_::schedule_params(schedule, n);

  const or_::EuclideanGreenKernel kernel(3);
  const or_::GramMatrix gm = or_::assemble_gram(kernel, ds.x, gamma, q);
  const double n_lambda = static_cast<double>(n) * lambda;
  const or_::RidgeSolution sol = or_::ridge_solve(gm, ds.y, n_lambda);

  const bool residual_ok = sol.residual_norm <= 1e-8 * ds.y.norm();

  const auto objective = [&](const Eigen::VectorXd& c) {
    const Eigen::VectorXd r = ds.y - gm.entries * c;
    return r.squaredNorm() / static_cast<double>(n) + lambda * c.dot(gm.entries * c);
  };
  const double at_solution = objective(sol.c);
  const double eps = 1e-4 * sol.c.norm();
  bool minimal = true;
  double worst_drop = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    or_::CounterRng rng(or_::derive_seed(504, trial));
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = rng.normal();
    u.normalize();
    const double drop = at_solution - objective(sol.c + eps * u);
    worst_drop = std::max(worst_drop, drop);
    minimal = minimal && drop <= 1e-12;
  }

  or_::FittedModel model;
  model.centers = ds.x;
  model.c = sol.c;
  model.gamma = gamma;
  model.lambda = lambda;
  model.space = kernel.params();
  const Eigen::VectorXd gram_image = gm.entries * sol.c;
  double worst_mean_gap = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double smoothed = or_::smoothed_predict(model, ds.x.row(i).transpose(), q);
    worst_mean_gap = std::max(worst_mean_gap, std::abs(smoothed - gram_image[i]));
  }
  const bool means_ok = worst_mean_gap <= 1e-8 * gamma;

  const double secs = elapsed(start);
  const bool pass = residual_ok && minimal && means_ok && secs < 30.0;
  std::ostringstream detail;
  detail << "residual=" << sol.residual_norm / ds.y.norm()
         << " worst_obj_drop=" << worst_drop
         << " worst_mean_gap/gamma=" << worst_mean_gap / gamma;
  record(2, "representer identities at n=512", pass, secs, detail.str());
}

// 3. Potential-theory identities: harmonicity residual <= 1e-8 relative on 100
//    admissible geometries; closed-form potential to 1e-12 for d in {3,4,5};
//    capacitary mean of 1 within 1e-14.
void criterion3() {
  const auto start = Clock::now();
  const or_::EuclideanGreenKernel kernel(3);
  const or_::SphereQuadrature q = or_::sphere_quadrature(3, kQuadLevel);

  double worst_harm = 0.0;
  for (int case_id = 0; case_id < 100; ++case_id) {
    or_::CounterRng rng(or_::derive_seed(505, case_id));
    const double radius = rng.uniform(0.5, 1.5);
    const double gamma = kernel.eval_at_distance(radius);
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform(-1.0, 1.0);
    const or_::Obstacle o = or_::make_obstacle(kernel, x, gamma);
    const double rho = rng.uniform(0.3, 0.7) * radius;
    const double sep = rng.uniform(1.3, 3.0) * (radius + rho);
    Eigen::VectorXd dir(3);
    double norm = 0.0;
    for (int j = 0; j < 3; ++j) {
      dir[j] = rng.normal();
      norm += dir[j] * dir[j];
    }
    const Eigen::VectorXd y = x + dir * (sep / std::sqrt(norm));
    const double residual = or_::harmonicity_residual(kernel, o, y, rho, q);
    const double value = std::min(kernel.eval(x, y), gamma);
    worst_harm = std::max(worst_harm, residual / value);
  }

  double worst_pot = 0.0;
  for (int d : {3, 4, 5}) {
    const or_::EuclideanGreenKernel kd(d);
    for (int case_id = 0; case_id < 300; ++case_id) {
      or_::CounterRng rng(or_::derive_seed(506, d, case_id));
      Eigen::VectorXd x(d), y(d);
      for (int j = 0; j < d; ++j) {
        x[j] = rng.uniform(-1.0, 1.0);
        y[j] = rng.uniform(-1.0, 1.0);
      }
      const double gamma = rng.uniform(0.25, 8.0);
      const or_::Obstacle o = or_::make_obstacle(kd, x, gamma);
      const double r = (y - x).norm();
      if (r == 0.0) continue;
      const double expected = std::min(std::pow(o.radius / r, d - 2.0), 1.0);
      const double got = or_::equilibrium_potential(kd, o, y);
      worst_pot = std::max(worst_pot, std::abs(got - expected) / expected);
    }
  }

  Eigen::VectorXd center = Eigen::VectorXd::Constant(3, 0.3);
  const or_::Obstacle o1 = or_::make_obstacle(kernel, center, 1.7);
  const double mean_one = or_::capacitary_mean(
      o1, q, [](const Eigen::VectorXd&) { return 1.0; });
  const double one_err = std::abs(mean_one - 1.0);

  const double secs = elapsed(start);
  const bool pass = worst_harm <= 1e-8 && worst_pot <= 1e-12 && one_err <= 1e-14;
  std::ostringstream detail;
  detail << "max_harmonicity=" << worst_harm << " max_potential_err=" << worst_pot
         << " mean1_err=" << one_err;
  record(3, "potential-theory identities", pass, secs, detail.str());
}

// 4. Capacitary Poincare scaling: slope of log ratio vs log gamma over
//    {1, 2, 4, 8} must be <= -1.7 with finite positive ratios; < 5 min.
void criterion4() {
  const auto start = Clock::now();
  const or_::EuclideanGreenKernel kernel(3);
  const or_::SphereQuadrature q = or_::sphere_quadrature(3, kQuadLevel);
  const or_::SyntheticTarget g =
      or_::synth_target(3, 3, 2.0, or_::derive_seed(507, 0), q);

  std::vector<double> log_gamma, log_ratio;
  bool all_positive = true;
  for (double gamma : {1.0, 2.0, 4.0, 8.0}) {
    double mean_ratio = 0.0;
    for (int s = 0; s < 5; ++s) {
      const or_::UniformCubeSampler nu{3, or_::derive_seed(508, s)};
      mean_ratio += or_::poincare_ratio(kernel, g, gamma, nu, 10000, q).value;
    }
    mean_ratio /= 5.0;
    all_positive = all_positive && mean_ratio > 0.0 && std::isfinite(mean_ratio);
    log_gamma.push_back(std::log(gamma));
    log_ratio.push_back(std::log(mean_ratio));
  }
  double slope = 0.0;
  if (all_positive) slope = or_::fit_slope(log_gamma, log_ratio).first;

  const double secs = elapsed(start);
  const bool pass = all_positive && slope <= -1.7 && secs < 300.0;
  std::ostringstream detail;
  detail << "slope=" << slope << " (bound -1.7, theory -2)";
  record(4, "capacitary Poincare scaling", pass, secs, detail.str());
}

// 5. Ridge rate: fitted slope within [-0.55, -0.25] (theory -0.4) on the
//    reference design; < 15 min.
void criterion5() {
  const auto start = Clock::now();
  g_ridge_result = or_::run_rate_study(reference_config(or_::ScheduleMode::ridge));
  g_have_ridge = true;
  const double secs = elapsed(start);
  const double slope = g_ridge_result.slope;
  const bool pass = slope >= -0.55 && slope <= -0.25 && secs < 900.0;
  std::ostringstream detail;
  detail << "slope=" << slope << " stderr=" << g_ridge_result.slope_stderr
         << " band=[-0.55,-0.25]";
  record(5, "ridge convergence rate", pass, secs, detail.str());
}

// 6. ERM rate: slope within [-0.50, -0.17] (theory -1/3) and shallower than
//    the matched ridge slope on >= 4 of 5 seed pairings; < 20 min.
void criterion6() {
  const auto start = Clock::now();
  if (!g_have_ridge) {
    g_ridge_result = or_::run_rate_study(reference_config(or_::ScheduleMode::ridge));
    g_have_ridge = true;
  }
  const or_::RateStudyResult erm =
      or_::run_rate_study(reference_config(or_::ScheduleMode::erm));
  const double secs = elapsed(start);

  int shallower = 0;
  for (std::size_t i = 0; i < kSeeds.size(); ++i) {
    if (erm.per_seed_slopes[i] > g_ridge_result.per_seed_slopes[i]) ++shallower;
  }
  const double slope = erm.slope;
  const bool pass = slope >= -0.50 && slope <= -0.17 && shallower >= 4 &&
                    secs < 1200.0;
  std::ostringstream detail;
  detail << "slope=" << slope << " band=[-0.50,-0.17] shallower_pairs="
         << shallower << "/5 (ridge slope " << g_ridge_result.slope << ")";
  record(6, "ERM convergence rate", pass, secs, detail.str());
}

// 7. Ill-posedness demo: energy exponent d-2 within 1e-6, exact interpolation,
//    monotone L2 decay.
void criterion7() {
  const auto start = Clock::now();
  const std::vector<double> widths = {0.02, 0.01, 0.005, 0.0025};
  const or_::IllposedResult res = or_::illposed_demo(3, widths, 509);

  const bool exponent_ok = std::abs(res.energy_exponent - 1.0) <= 1e-6;
  bool interp_exact = true;
  for (const auto& row : res.rows) {
    interp_exact = interp_exact && row.max_interp_error == 0.0;
  }
  bool monotone = true;
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    monotone = monotone && res.rows[i].l2_norm_sq <= res.rows[i - 1].l2_norm_sq;
  }

  const double secs = elapsed(start);
  const bool pass = exponent_ok && interp_exact && monotone;
  std::ostringstream detail;
  detail << "exponent=" << res.energy_exponent << " interp_exact="
         << (interp_exact ? "yes" : "no") << " l2_monotone="
         << (monotone ? "yes" : "no");
  record(7, "ill-posedness demo", pass, secs, detail.str());
}

// 8. Determinism: every CLI artifact byte-identical across two runs with
//    identical flags and different --threads values.
bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = '"' + g_cli_path + "\" " + args;
  return std::system(cmd.c_str());
}

void criterion8() {
  const auto start = Clock::now();
  if (g_cli_path.empty()) {
    record(8, "CLI determinism across thread counts", false, 0.0,
           "no --cli path provided");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "or_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Small dataset CSV for fit/predict.
  const fs::path data = dir / "data.csv";
  {
    std::ofstream out(data);
    out << "x1,x2,x3,y\n";
    or_::CounterRng rng(or_::derive_seed(510, 0));
    for (int i = 0; i < 48; ++i) {
      out << rng.uniform01() << ',' << rng.uniform01() << ',' << rng.uniform01()
          << ',' << rng.uniform(-1.0, 1.0) << "\n";
    }
  }
  const fs::path query = dir / "query.csv";
  {
    std::ofstream out(query);
    out << "x1,x2,x3\n0.5,0.5,0.5\n0.1,0.9,0.4\n0.8,0.2,0.6\n";
  }

  struct Job {
    std::string name;
    std::string args;  // without --threads/--out
    std::vector<std::string> artifacts;
  };
  const std::string d = dir.string();
  std::vector<Job> jobs = {
      {"fit",
       "fit --data \"" + data.string() + "\" --gamma0 2 --lambda0 0.5 --out ",
       {"model.json"}},
      {"rate-study",
       "rate-study --n-grid 32,64 --seeds 1,2 --lambda0 0.1 --test-size 1000 "
       "--quad-level 2 --target-k 3 --target-tau 2 --slope-min -9 --slope-max 9 "
       "--out ",
       {".csv", ".json"}},
      {"erm-study",
       "erm-study --n-grid 32,64 --seeds 1,2 --test-size 1000 --quad-level 2 "
       "--target-k 3 --target-tau 2 --slope-min -9 --slope-max 9 --out ",
       {".csv", ".json"}},
      {"check",
       "check --quad-level 2 --mc-samples 20000 --poincare-samples 2000 --out ",
       {".json"}},
      {"illposed", "illposed --widths 0.02,0.01,0.005 --seed 3 --out ", {".csv", ".json"}},
  };

  bool all_ok = true;
  std::string failures;
  for (const auto& job : jobs) {
    for (int variant = 0; variant < 2; ++variant) {
      const std::string threads = variant == 0 ? "1" : "3";
      const std::string out_base =
          (dir / (job.name + "_t" + threads)).string();
      std::string out_arg = out_base;
      if (job.name == "fit") out_arg = out_base + "model.json";
      if (job.name == "check") out_arg = out_base + ".json";
      const std::string log = out_base + ".log";
      const int rc = run_cli("--threads " + threads + " " + job.args + "\"" +
                             out_arg + "\" > \"" + log + "\" 2>&1");
      if (rc != 0) {
        all_ok = false;
        failures += job.name + ":exit" + std::to_string(rc) + " ";
      }
    }
    for (const auto& suffix : job.artifacts) {
      fs::path a, b;
      if (job.name == "fit") {
        a = dir / "fit_t1model.json";
        b = dir / "fit_t3model.json";
      } else if (job.name == "check") {
        a = dir / "check_t1.json";
        b = dir / "check_t3.json";
      } else {
        a = dir / (job.name + "_t1" + suffix);
        b = dir / (job.name + "_t3" + suffix);
      }
      if (!same_bytes(a, b)) {
        all_ok = false;
        failures += job.name + suffix + ":differs ";
      }
    }
  }

  // fit -> predict chain on the threaded model, both thread counts.
  {
    const std::string model = (dir / "fit_t1model.json").string();
    for (int variant = 0; variant < 2; ++variant) {
      const std::string threads = variant == 0 ? "1" : "3";
      const std::string out = (dir / ("pred_t" + threads + ".csv")).string();
      const std::string log = (dir / ("pred_t" + threads + ".log")).string();
      const int rc = run_cli("--threads " + threads + " predict --model \"" + model +
                             "\" --data \"" + query.string() + "\" --smoothed --out \"" +
                             out + "\" > \"" + log + "\" 2>&1");
      if (rc != 0) {
        all_ok = false;
        failures += "predict:exit" + std::to_string(rc) + " ";
      }
    }
    if (!same_bytes(dir / "pred_t1.csv", dir / "pred_t3.csv")) {
      all_ok = false;
      failures += "predict.csv:differs ";
    }
  }

  const double secs = elapsed(start);
  record(8, "CLI determinism across thread counts", all_ok, secs,
         all_ok ? "all artifacts byte-identical" : failures);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      g_cli_path = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      std::istringstream in(argv[++i]);
      std::string token;
      while (std::getline(in, token, ',')) only.insert(std::stoi(token));
    }
  }
  const auto want = [&](int id) { return only.empty() || only.count(id) > 0; };

  std::printf("acceptance suite (quad level %d, n grid up to %lld)\n", kQuadLevel,
              static_cast<long long>(kNGrid.back()));
  if (want(1)) criterion1();
  if (want(2)) criterion2();
  if (want(3)) criterion3();
  if (want(4)) criterion4();
  if (want(5)) criterion5();
  if (want(6)) criterion6();
  if (want(7)) criterion7();
  if (want(8)) criterion8();

  int failures = 0;
  for (const auto& o : g_outcomes) failures += o.pass ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(g_outcomes.size()) - failures,
              g_outcomes.size());
  return failures == 0 ? 0 : 1;
}
