#include "obstacle_ridge/estimator.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "obstacle_ridge/threading.hpp"

namespace obstacle_ridge {

namespace {

EuclideanGreenKernel kernel_for(const Dataset& ds) {
  return EuclideanGreenKernel(ds.dimension());
}

void check_dataset(const Dataset& ds) {
  if (ds.x.rows() < 1) throw ShapeError("dataset must contain at least one row");
  if (ds.y.size() != ds.x.rows()) {
    throw ShapeError("dataset has " + std::to_string(ds.x.rows()) +
                     " covariate rows but " + std::to_string(ds.y.size()) +
                     " responses");
  }
  if (!ds.x.allFinite() || !ds.y.allFinite()) {
    throw ParamError("dataset contains non-finite entries");
  }
}

void check_query(const FittedModel& m, const ConstVecRef& x) {
  if (x.size() != m.space.dimension) {
    throw ShapeError("query point has dimension " + std::to_string(x.size()) +
                     ", model expects " + std::to_string(m.space.dimension));
  }
}

std::string to_hex_float(double v) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  std::string s(buf, res.ptr);
  if (!s.empty() && s.front() == '-') return "-0x" + s.substr(1);
  return "0x" + s;
}

double from_hex_float(const std::string& s) {
  std::string_view sv(s);
  bool negative = false;
  if (!sv.empty() && (sv.front() == '+' || sv.front() == '-')) {
    negative = sv.front() == '-';
    sv.remove_prefix(1);
  }
  if (sv.rfind("0x", 0) == 0 || sv.rfind("0X", 0) == 0) sv.remove_prefix(2);
  double v = 0.0;
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v,
                             std::chars_format::hex);
  if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size()) {
    throw Error("invalid hex-float literal '" + s + "'");
  }
  return negative ? -v : v;
}

}  // namespace

std::pair<double, double> schedule_params(const Schedule& s, std::int64_t n) {
  if (n < 1) throw ParamError("schedule_params requires n >= 1");
  const double d = static_cast<double>(s.dimension);
  const double nn = static_cast<double>(n);
  if (s.mode == ScheduleMode::erm) {
    const double gamma = s.gamma0 * std::pow(nn, (d - 2.0) / (2.0 * d));
    return {gamma, 0.0};
  }
  const double gamma = s.gamma0 * std::pow(nn, (d - 2.0) / (d + 2.0));
  const double lambda = s.linked
                            ? s.kappa * std::pow(gamma, 2.0 / (2.0 - d))
                            : s.lambda0 * std::pow(nn, -2.0 / (d + 2.0));
  return {gamma, lambda};
}

FittedModel fit(const Dataset& ds, double gamma, double lambda,
                const SphereQuadrature& q) {
  check_dataset(ds);
  if (!(gamma > 0.0)) throw ParamError("fit requires gamma > 0");
  if (!(lambda > 0.0)) throw ParamError("fit requires lambda > 0");
  const EuclideanGreenKernel kernel = kernel_for(ds);
  const GramMatrix gm = assemble_gram(kernel, ds.x, gamma, q);
  const double n_lambda = static_cast<double>(ds.size()) * lambda;
  const RidgeSolution sol = ridge_solve(gm, ds.y, n_lambda);

  FittedModel m;
  m.centers = ds.x;
  m.c = sol.c;
  m.gamma = gamma;
  m.lambda = lambda;
  m.space = kernel.params();
  m.applied_jitter = sol.applied_jitter;
  return m;
}

FittedModel erm_fit(const Dataset& ds, double gamma, double radius,
                    const SphereQuadrature& q) {
  check_dataset(ds);
  if (!(gamma > 0.0)) throw ParamError("erm_fit requires gamma > 0");
  if (!(radius > 0.0)) throw ParamError("erm_fit requires M > 0");
  const EuclideanGreenKernel kernel = kernel_for(ds);
  const GramMatrix gm = assemble_gram(kernel, ds.x, gamma, q);
  const ErmSolution sol = erm_solve(gm, ds.y, radius);

  FittedModel m;
  m.centers = ds.x;
  m.c = sol.c;
  m.gamma = gamma;
  m.lambda = sol.lambda_active;
  m.space = kernel.params();
  return m;
}

double predict(const FittedModel& m, const ConstVecRef& x) {
  check_query(m, x);
  const EuclideanGreenKernel kernel(m.space.dimension);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.centers.rows(); ++i) {
    acc += m.c[i] *
           std::min(kernel.eval(m.centers.row(i).transpose(), x), m.gamma);
  }
  return acc;
}

Eigen::VectorXd predict_batch(const FittedModel& m, const Eigen::MatrixXd& xs) {
  Eigen::VectorXd out(xs.rows());
  parallel_for(xs.rows(),
               [&](std::int64_t i) { out[i] = predict(m, xs.row(i).transpose()); });
  return out;
}

double smoothed_predict(const FittedModel& m, const ConstVecRef& x,
                        const SphereQuadrature& q) {
  check_query(m, x);
  const EuclideanGreenKernel kernel(m.space.dimension);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.centers.rows(); ++i) {
    acc += m.c[i] *
           gram_entry(kernel, m.centers.row(i).transpose(), x, m.gamma, q);
  }
  return acc;
}

Eigen::VectorXd smoothed_predict_batch(const FittedModel& m,
                                       const Eigen::MatrixXd& xs,
                                       const SphereQuadrature& q) {
  Eigen::VectorXd out(xs.rows());
  parallel_for(xs.rows(), [&](std::int64_t i) {
    out[i] = smoothed_predict(m, xs.row(i).transpose(), q);
  });
  return out;
}

std::string model_to_json(const FittedModel& m) {
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["d"] = m.space.dimension;
  doc["n"] = static_cast<std::int64_t>(m.centers.rows());
  doc["gamma"] = to_hex_float(m.gamma);
  doc["lambda"] = to_hex_float(m.lambda);
  doc["space"] = {{"dimension", m.space.dimension},
                  {"walk_exponent", to_hex_float(m.space.walk_exponent)},
                  {"green_constant", to_hex_float(m.space.green_constant)}};
  nlohmann::json centers = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.centers.rows(); ++i)
    for (Eigen::Index j = 0; j < m.centers.cols(); ++j)
      centers.push_back(to_hex_float(m.centers(i, j)));
  doc["centers"] = std::move(centers);
  nlohmann::json coeffs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.c.size(); ++i)
    coeffs.push_back(to_hex_float(m.c[i]));
  doc["c"] = std::move(coeffs);
  return doc.dump(2) + "\n";
}

FittedModel model_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.at("format_version").get<int>() != 1) {
    throw Error("unsupported model format_version");
  }
  FittedModel m;
  const int d = doc.at("d").get<int>();
  const auto n = doc.at("n").get<std::int64_t>();
  m.gamma = from_hex_float(doc.at("gamma").get<std::string>());
  m.lambda = from_hex_float(doc.at("lambda").get<std::string>());
  const auto& space = doc.at("space");
  m.space.dimension = space.at("dimension").get<int>();
  m.space.walk_exponent =
      from_hex_float(space.at("walk_exponent").get<std::string>());
  m.space.green_constant =
      from_hex_float(space.at("green_constant").get<std::string>());
  if (m.space.dimension != d) throw Error("model dimension fields disagree");

  const auto& centers = doc.at("centers");
  if (static_cast<std::int64_t>(centers.size()) != n * d) {
    throw Error("model centers array has wrong length");
  }
  m.centers.resize(n, d);
  for (std::int64_t i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      m.centers(i, j) = from_hex_float(centers[i * d + j].get<std::string>());
  const auto& coeffs = doc.at("c");
  if (static_cast<std::int64_t>(coeffs.size()) != n) {
    throw Error("model coefficient array has wrong length");
  }
  m.c.resize(n);
  for (std::int64_t i = 0; i < n; ++i)
    m.c[i] = from_hex_float(coeffs[i].get<std::string>());
  return m;
}

void save_model(const std::string& path, const FittedModel& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << model_to_json(m);
  if (!out) throw Error("short write to '" + path + "'");
}

FittedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace obstacle_ridge
