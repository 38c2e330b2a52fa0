#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>

#include "obstacle_ridge/gram.hpp"
#include "obstacle_ridge/solve.hpp"

namespace obstacle_ridge {

struct Dataset {
  Eigen::MatrixXd x;  ///< n x d covariates
  Eigen::VectorXd y;  ///< n responses

  Eigen::Index size() const { return x.rows(); }
  int dimension() const { return static_cast<int>(x.cols()); }
};

/// Complete estimator state: f(x) = sum_i c_i min(G(center_i, x), gamma).
struct FittedModel {
  Eigen::MatrixXd centers;
  Eigen::VectorXd c;
  double gamma = 0.0;
  double lambda = 0.0;  ///< ridge weight, or the active multiplier for ERM fits
  SpaceParams space;
  double applied_jitter = 0.0;
};

enum class ScheduleMode { ridge, erm };

/// Threshold/ridge schedules with the theoretical exponents hard-wired
/// (alpha = d, beta = 2):
///   ridge: gamma_n = gamma0 n^{(d-2)/(d+2)},  lambda_n = lambda0 n^{-2/(d+2)}
///   erm:   gamma_n = gamma0 n^{(d-2)/(2d)},   lambda unused (0)
/// With `linked` set, the ridge weight follows the proportionality
/// lambda = kappa gamma^{2/(2-d)} instead of a free lambda0.
struct Schedule {
  double gamma0 = 1.0;
  double lambda0 = 1.0;
  ScheduleMode mode = ScheduleMode::ridge;
  int dimension = 3;
  bool linked = false;
  double kappa = 1.0;
};

std::pair<double, double> schedule_params(const Schedule& s, std::int64_t n);

FittedModel fit(const Dataset& ds, double gamma, double lambda,
                const SphereQuadrature& q);

FittedModel erm_fit(const Dataset& ds, double gamma, double radius,
                    const SphereQuadrature& q);

double predict(const FittedModel& m, const ConstVecRef& x);

/// Row-wise predictions, parallel over query points.
Eigen::VectorXd predict_batch(const FittedModel& m, const Eigen::MatrixXd& xs);

/// Capacitary smoothing of the estimator at x: each representer term is
/// replaced by its boundary mean over the gamma-sphere at x, which at a
/// training center reproduces the Gram image (G_n c)_i exactly.
double smoothed_predict(const FittedModel& m, const ConstVecRef& x,
                        const SphereQuadrature& q);

Eigen::VectorXd smoothed_predict_batch(const FittedModel& m,
                                       const Eigen::MatrixXd& xs,
                                       const SphereQuadrature& q);

/// JSON model document; every f64 is stored as a hex-float string so the
/// round trip is bit-exact.
void save_model(const std::string& path, const FittedModel& m);
FittedModel load_model(const std::string& path);
std::string model_to_json(const FittedModel& m);
FittedModel model_from_json(const std::string& text);

}  // namespace obstacle_ridge
