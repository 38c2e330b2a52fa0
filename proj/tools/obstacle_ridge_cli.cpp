#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "obstacle_ridge/csv.hpp"
#include "obstacle_ridge/experiments.hpp"
#include "obstacle_ridge/oracle.hpp"

namespace or_ = obstacle_ridge;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitBandFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInternalError = 3;

int resolve_threads(std::optional<int> flag) {
  if (flag && *flag >= 1) return *flag;
  if (const char* env = std::getenv("OBSTACLE_RIDGE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw or_::Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw or_::Error("short write to '" + path + "'");
}

std::vector<std::string> echo_lines(const json& config) {
  std::vector<std::string> lines;
  for (auto it = config.begin(); it != config.end(); ++it) {
    lines.push_back(it.key() + "=" + (it->is_string()
                                          ? it->get<std::string>()
                                          : it->dump()));
  }
  return lines;
}

or_::GramMatrix assemble_with_cache(const or_::EuclideanGreenKernel& kernel,
                                    const Eigen::MatrixXd& points, double gamma,
                                    const or_::SphereQuadrature& q,
                                    const std::string& cache_dir) {
  if (cache_dir.empty()) return or_::assemble_gram(kernel, points, gamma, q);
  const std::uint64_t key = or_::gram_cache_key(points, gamma, q);
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.ogrm",
                static_cast<unsigned long long>(key));
  const std::filesystem::path path = std::filesystem::path(cache_dir) / name;
  if (std::filesystem::exists(path)) {
    return or_::load_gram(path.string());
  }
  const or_::GramMatrix gm = or_::assemble_gram(kernel, points, gamma, q);
  std::filesystem::create_directories(cache_dir);
  or_::save_gram(path.string(), gm);
  return gm;
}

struct StudyOptions {
  int d = 3;
  std::string n_grid = "256,512,1024,2048,4096";
  std::string seeds = "1,2,3,4,5";
  double gamma0 = 1.0;
  double lambda0 = 1.0;
  bool linked = false;
  double kappa = 1.0;
  std::string mode = "ridge";
  double noise_sd = 0.5;
  std::int64_t test_size = 4096;
  int quad_level = 3;
  int target_k = 5;
  double target_tau = 4.0;
  std::uint64_t target_seed = 7;
  double erm_radius_factor = 2.0;
  double slope_min = -0.55;
  double slope_max = -0.25;
  std::string out = "rate_study";
};

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    if constexpr (std::is_same_v<T, double>) {
      out.push_back(std::stod(token));
    } else {
      out.push_back(static_cast<T>(std::stoll(token)));
    }
  }
  return out;
}

json study_config_json(const StudyOptions& opt) {
  json config;
  config["subcommand"] = opt.mode == "erm" ? "erm-study" : "rate-study";
  config["d"] = opt.d;
  config["n_grid"] = opt.n_grid;
  config["seeds"] = opt.seeds;
  config["gamma0"] = opt.gamma0;
  config["lambda0"] = opt.lambda0;
  config["linked"] = opt.linked;
  config["kappa"] = opt.kappa;
  config["mode"] = opt.mode;
  config["noise_sd"] = opt.noise_sd;
  config["test_size"] = opt.test_size;
  config["quad_level"] = opt.quad_level;
  config["target_k"] = opt.target_k;
  config["target_tau"] = opt.target_tau;
  config["target_seed"] = opt.target_seed;
  config["erm_radius_factor"] = opt.erm_radius_factor;
  config["slope_min"] = opt.slope_min;
  config["slope_max"] = opt.slope_max;
  config["out"] = opt.out;
  return config;
}

int run_study(const StudyOptions& opt) {
  or_::ExperimentConfig cfg;
  cfg.dimension = opt.d;
  cfg.n_grid = parse_list<std::int64_t>(opt.n_grid);
  cfg.seeds = parse_list<std::uint64_t>(opt.seeds);
  cfg.gamma0 = opt.gamma0;
  cfg.lambda0 = opt.lambda0;
  cfg.linked = opt.linked;
  cfg.kappa = opt.kappa;
  cfg.mode = opt.mode == "erm" ? or_::ScheduleMode::erm : or_::ScheduleMode::ridge;
  cfg.noise_sd = opt.noise_sd;
  cfg.test_size = opt.test_size;
  cfg.quad_level = opt.quad_level;
  cfg.target_centers = opt.target_k;
  cfg.target_tau = opt.target_tau;
  cfg.target_seed = opt.target_seed;
  cfg.erm_radius_factor = opt.erm_radius_factor;

  const or_::RateStudyResult result = or_::run_rate_study(cfg);
  for (const auto& cell : result.cells) {
    std::cerr << "cell n=" << cell.n << " seed=" << cell.seed
              << " mse=" << or_::format_double(cell.mse) << " wall_ms="
              << or_::format_double(cell.wall_ms) << "\n";
  }

  const json config = study_config_json(opt);
  std::ostringstream csv;
  for (const auto& line : echo_lines(config)) csv << "# " << line << "\n";
  csv << "n,seed,gamma,lambda,mse\n";
  for (const auto& cell : result.cells) {
    csv << cell.n << ',' << cell.seed << ',' << or_::format_double(cell.gamma)
        << ',' << or_::format_double(cell.lambda) << ','
        << or_::format_double(cell.mse) << "\n";
  }
  write_text_file(opt.out + ".csv", csv.str());

  const bool pass = result.slope >= opt.slope_min && result.slope <= opt.slope_max;
  json summary;
  summary["config"] = config;
  summary["slope"] = result.slope;
  summary["slope_stderr"] = result.slope_stderr;
  summary["per_seed_slopes"] = result.per_seed_slopes;
  summary["mean_mse"] = result.mean_mse;
  summary["target_energy"] = result.target_energy;
  summary["band"] = {{"min", opt.slope_min}, {"max", opt.slope_max}};
  summary["pass"] = pass;
  write_text_file(opt.out + ".json", summary.dump(2) + "\n");

  std::cout << "slope=" << or_::format_double(result.slope)
            << " stderr=" << or_::format_double(result.slope_stderr)
            << " band=[" << opt.slope_min << "," << opt.slope_max << "]"
            << " pass=" << (pass ? "yes" : "no") << "\n";
  return pass ? kExitPass : kExitBandFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-obstacle renormalized ridge regression"};
  app.require_subcommand(1);
  std::optional<int> threads_flag;
  app.add_option("--threads", threads_flag,
                 "worker pool size hint (env OBSTACLE_RIDGE_THREADS as fallback)");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit a model from a dataset CSV");
  std::string fit_data, fit_out = "model.json", fit_mode = "ridge";
  std::string fit_cache;
  double fit_gamma0 = 1.0, fit_lambda0 = 1.0, fit_erm_radius = 1.0;
  int fit_quad_level = 3;
  std::uint64_t fit_seed = 1;
  fit_cmd->add_option("--data", fit_data, "dataset CSV with header x1..xd,y")
      ->required();
  fit_cmd->add_option("--gamma0", fit_gamma0, "threshold scale gamma0");
  fit_cmd->add_option("--lambda0", fit_lambda0, "ridge scale lambda0");
  fit_cmd->add_option("--mode", fit_mode, "ridge|erm")
      ->check(CLI::IsMember({"ridge", "erm"}));
  fit_cmd->add_option("--erm-radius", fit_erm_radius, "norm bound M (erm mode)");
  fit_cmd->add_option("--quad-level", fit_quad_level, "quadrature level");
  fit_cmd->add_option("--seed", fit_seed, "master seed (MC quadrature for d > 3)");
  fit_cmd->add_option("--gram-cache", fit_cache, "directory for OGRM Gram caching");
  fit_cmd->add_option("--out", fit_out, "output model path");

  // predict
  auto* pred_cmd = app.add_subcommand("predict", "evaluate a saved model");
  std::string pred_model, pred_data, pred_out = "predictions.csv";
  bool pred_smoothed = false;
  int pred_quad_level = 3;
  std::uint64_t pred_seed = 1;
  pred_cmd->add_option("--model", pred_model, "model JSON path")->required();
  pred_cmd->add_option("--data", pred_data, "query CSV with header x1..xd")
      ->required();
  pred_cmd->add_flag("--smoothed", pred_smoothed,
                     "capacitary smoothing instead of raw evaluation");
  pred_cmd->add_option("--quad-level", pred_quad_level, "quadrature level");
  pred_cmd->add_option("--seed", pred_seed, "master seed (MC quadrature for d > 3)");
  pred_cmd->add_option("--out", pred_out, "output CSV path");

  // rate-study / erm-study
  StudyOptions study;
  auto add_study_options = [&](CLI::App* cmd) {
    cmd->add_option("--d", study.d, "ambient dimension");
    cmd->add_option("--n-grid", study.n_grid, "comma-separated sample sizes");
    cmd->add_option("--seeds", study.seeds, "comma-separated seeds");
    cmd->add_option("--gamma0", study.gamma0, "threshold scale gamma0");
    cmd->add_option("--lambda0", study.lambda0, "ridge scale lambda0");
    cmd->add_flag("--linked", study.linked,
                  "couple lambda = kappa gamma^{2/(2-d)} instead of lambda0");
    cmd->add_option("--kappa", study.kappa, "coupling constant for --linked");
    cmd->add_option("--noise-sd", study.noise_sd, "noise standard deviation rho");
    cmd->add_option("--test-size", study.test_size, "MC test points per cell");
    cmd->add_option("--quad-level", study.quad_level, "quadrature level");
    cmd->add_option("--target-k", study.target_k, "number of target representers");
    cmd->add_option("--target-tau", study.target_tau, "target truncation tau");
    cmd->add_option("--target-seed", study.target_seed, "target seed");
    cmd->add_option("--erm-radius-factor", study.erm_radius_factor,
                    "M as a multiple of ||f*||_H (erm mode)");
    cmd->add_option("--slope-min", study.slope_min, "acceptance band lower edge");
    cmd->add_option("--slope-max", study.slope_max, "acceptance band upper edge");
    cmd->add_option("--out", study.out, "output prefix (.csv/.json)");
  };
  auto* rate_cmd = app.add_subcommand("rate-study", "ridge convergence-rate study");
  rate_cmd->add_option("--mode", study.mode, "ridge|erm")
      ->check(CLI::IsMember({"ridge", "erm"}));
  add_study_options(rate_cmd);
  auto* erm_cmd = app.add_subcommand("erm-study", "constrained-ERM rate study");
  add_study_options(erm_cmd);

  // check
  auto* check_cmd = app.add_subcommand("check", "run the verification oracle suite");
  or_::CheckConfig check_cfg;
  std::string check_out = "check_report.json";
  check_cmd->add_option("--seed", check_cfg.seed, "master seed");
  check_cmd->add_option("--quad-level", check_cfg.quad_level, "quadrature level");
  check_cmd->add_option("--mc-samples", check_cfg.mc_samples, "MC oracle samples");
  check_cmd->add_option("--poincare-samples", check_cfg.poincare_samples,
                        "samples per Poincare ratio");
  check_cmd->add_option("--out", check_out, "report path");

  // illposed
  auto* ill_cmd = app.add_subcommand("illposed", "thin-plate minimizing-sequence demo");
  int ill_d = 3;
  std::string ill_widths = "0.02,0.01,0.005,0.0025";
  std::uint64_t ill_seed = 1;
  double ill_tol = 1e-6;
  std::string ill_out = "illposed";
  ill_cmd->add_option("--d", ill_d, "ambient dimension");
  ill_cmd->add_option("--widths", ill_widths, "comma-separated decreasing widths");
  ill_cmd->add_option("--seed", ill_seed, "master seed");
  ill_cmd->add_option("--exponent-tol", ill_tol, "band around the exponent d-2");
  ill_cmd->add_option("--out", ill_out, "output prefix (.csv/.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  or_::set_worker_count(resolve_threads(threads_flag));

  try {
    if (fit_cmd->parsed()) {
      const or_::Dataset ds = or_::read_dataset_csv(fit_data);
      or_::Schedule schedule;
      schedule.gamma0 = fit_gamma0;
      schedule.lambda0 = fit_lambda0;
      schedule.mode =
          fit_mode == "erm" ? or_::ScheduleMode::erm : or_::ScheduleMode::ridge;
      schedule.dimension = ds.dimension();
      const auto [gamma, lambda] = or_::schedule_params(schedule, ds.size());

      const or_::EuclideanGreenKernel kernel(ds.dimension());
      const or_::SphereQuadrature q = or_::sphere_quadrature(
          ds.dimension(), fit_quad_level, or_::derive_seed(fit_seed, 0x71));
      const or_::GramMatrix gm =
          assemble_with_cache(kernel, ds.x, gamma, q, fit_cache);

      or_::FittedModel model;
      model.centers = ds.x;
      model.gamma = gamma;
      model.space = kernel.params();
      if (schedule.mode == or_::ScheduleMode::erm) {
        const or_::ErmSolution sol = or_::erm_solve(gm, ds.y, fit_erm_radius);
        model.c = sol.c;
        model.lambda = sol.lambda_active;
      } else {
        const or_::RidgeSolution sol =
            or_::ridge_solve(gm, ds.y, static_cast<double>(ds.size()) * lambda);
        model.c = sol.c;
        model.lambda = lambda;
        model.applied_jitter = sol.applied_jitter;
      }
      or_::save_model(fit_out, model);
      std::cout << "gamma=" << or_::format_double(model.gamma)
                << " lambda=" << or_::format_double(model.lambda)
                << " n=" << ds.size()
                << " jitter=" << or_::format_double(model.applied_jitter)
                << " h_norm_sq=" << or_::format_double(or_::h_norm_sq(gm, model.c))
                << "\n";
      return kExitPass;
    }

    if (pred_cmd->parsed()) {
      const or_::FittedModel model = or_::load_model(pred_model);
      const Eigen::MatrixXd points = or_::read_points_csv(pred_data);
      if (points.cols() != model.space.dimension) {
        throw or_::ShapeError("query dimension " + std::to_string(points.cols()) +
                              " does not match model dimension " +
                              std::to_string(model.space.dimension));
      }
      Eigen::VectorXd preds;
      if (pred_smoothed) {
        const or_::SphereQuadrature q = or_::sphere_quadrature(
            model.space.dimension, pred_quad_level, or_::derive_seed(pred_seed, 0x71));
        preds = or_::smoothed_predict_batch(model, points, q);
      } else {
        preds = or_::predict_batch(model, points);
      }
      json config;
      config["subcommand"] = "predict";
      config["model"] = pred_model;
      config["data"] = pred_data;
      config["smoothed"] = pred_smoothed;
      config["quad_level"] = pred_quad_level;
      config["seed"] = pred_seed;
      or_::write_predictions_csv(pred_out, echo_lines(config), preds);
      return kExitPass;
    }

    if (rate_cmd->parsed() || erm_cmd->parsed()) {
      if (erm_cmd->parsed()) {
        study.mode = "erm";
        if (erm_cmd->count("--slope-min") == 0) study.slope_min = -0.50;
        if (erm_cmd->count("--slope-max") == 0) study.slope_max = -0.17;
        if (erm_cmd->count("--out") == 0) study.out = "erm_study";
      }
      return run_study(study);
    }

    if (check_cmd->parsed()) {
      const std::vector<or_::CheckResult> results = or_::run_check_suite(check_cfg);
      bool all_pass = true;
      json checks = json::array();
      for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        json entry;
        entry["name"] = r.name;
        entry["measured"] = r.measured;
        entry["bound"] = r.bound;
        entry["pass"] = r.pass;
        entry["detail"] = r.detail;
        checks.push_back(entry);
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
                  << " measured=" << or_::format_double(r.measured)
                  << " bound=" << or_::format_double(r.bound) << "\n";
      }
      json report;
      json config;
      config["subcommand"] = "check";
      config["seed"] = check_cfg.seed;
      config["quad_level"] = check_cfg.quad_level;
      config["mc_samples"] = check_cfg.mc_samples;
      config["poincare_samples"] = check_cfg.poincare_samples;
      report["config"] = config;
      report["checks"] = checks;
      report["pass"] = all_pass;
      write_text_file(check_out, report.dump(2) + "\n");
      return all_pass ? kExitPass : kExitBandFail;
    }

    if (ill_cmd->parsed()) {
      const std::vector<double> widths = parse_list<double>(ill_widths);
      const or_::IllposedResult result = or_::illposed_demo(ill_d, widths, ill_seed);
      json config;
      config["subcommand"] = "illposed";
      config["d"] = ill_d;
      config["widths"] = ill_widths;
      config["seed"] = ill_seed;
      config["exponent_tol"] = ill_tol;

      std::ostringstream csv;
      for (const auto& line : echo_lines(config)) csv << "# " << line << "\n";
      csv << "width,max_interp_error,energy,l2_norm_sq\n";
      for (const auto& row : result.rows) {
        csv << or_::format_double(row.width) << ','
            << or_::format_double(row.max_interp_error) << ','
            << or_::format_double(row.energy) << ','
            << or_::format_double(row.l2_norm_sq) << "\n";
      }
      write_text_file(ill_out + ".csv", csv.str());

      bool monotone = true;
      for (std::size_t i = 1; i < result.rows.size(); ++i) {
        monotone = monotone &&
                   result.rows[i].l2_norm_sq <= result.rows[i - 1].l2_norm_sq;
      }
      bool interp_exact = true;
      for (const auto& row : result.rows) {
        interp_exact = interp_exact && row.max_interp_error == 0.0;
      }
      const bool exponent_ok =
          std::abs(result.energy_exponent - (ill_d - 2)) <= ill_tol;
      const bool pass = monotone && interp_exact && exponent_ok;

      json summary;
      summary["config"] = config;
      summary["energy_exponent"] = result.energy_exponent;
      summary["bump_energy_constant"] = result.bump_energy_constant;
      summary["min_separation"] = result.min_separation;
      summary["interpolation_exact"] = interp_exact;
      summary["l2_monotone"] = monotone;
      summary["pass"] = pass;
      write_text_file(ill_out + ".json", summary.dump(2) + "\n");
      std::cout << "energy_exponent=" << or_::format_double(result.energy_exponent)
                << " expected=" << (ill_d - 2) << " pass=" << (pass ? "yes" : "no")
                << "\n";
      return pass ? kExitPass : kExitBandFail;
    }
  } catch (const or_::CsvError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const or_::ShapeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const or_::DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const or_::ParamError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const or_::GeometryError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}
