#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "obstacle_ridge/estimator.hpp"

namespace obstacle_ridge {

/// Shortest decimal representation that round-trips the exact f64.
std::string format_double(double v);

/// Exact hex-float representation ("0x1.8p+1" style).
std::string format_double_hex(double v);

/// Reads a dataset CSV with header x1,...,xd,y. Throws CsvError with the
/// row/column of the first offense (1-based, header = row 1).
Dataset read_dataset_csv(const std::string& path);

/// Reads query points: header x1,...,xd (a trailing y column is ignored).
Eigen::MatrixXd read_points_csv(const std::string& path);

/// Writes predictions: leading "# key=value" config echo, then pred,pred_hex
/// rows (shortest decimal plus exact hex-float).
void write_predictions_csv(const std::string& path,
                           const std::vector<std::string>& config_echo,
                           const Eigen::VectorXd& predictions);

}  // namespace obstacle_ridge
