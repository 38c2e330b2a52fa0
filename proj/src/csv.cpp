#include "obstacle_ridge/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace obstacle_ridge {

std::string format_double(double v) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_double_hex(double v) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  std::string s(buf, res.ptr);
  if (!s.empty() && s.front() == '-') return "-0x" + s.substr(1);
  return "0x" + s;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(current);
      current.clear();
    } else if (ch != '\r') {
      current.push_back(ch);
    }
  }
  fields.push_back(current);
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t lo = s.find_first_not_of(" \t");
  if (lo == std::string::npos) return "";
  std::size_t hi = s.find_last_not_of(" \t");
  return s.substr(lo, hi - lo + 1);
}

double parse_double(const std::string& field, std::size_t row, std::size_t col) {
  const std::string t = trimmed(field);
  if (t.empty()) throw CsvError(row, col, "empty numeric field");
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw CsvError(row, col, "cannot parse '" + t + "' as a number");
  }
  return v;
}

struct ParsedCsv {
  int dimension = 0;
  bool has_response = false;
  std::vector<std::vector<double>> rows;
};

ParsedCsv parse_table(const std::string& path, bool require_response) {
  std::ifstream in(path);
  if (!in) throw CsvError(0, 0, "cannot open '" + path + "'");
  std::string line;
  std::size_t row = 0;

  // Header: x1,...,xd optionally followed by y.
  if (!std::getline(in, line)) throw CsvError(1, 1, "file is empty");
  ++row;
  const auto header = split_fields(line);
  ParsedCsv parsed;
  std::size_t n_x = header.size();
  if (!header.empty() && trimmed(header.back()) == "y") {
    parsed.has_response = true;
    --n_x;
  }
  if (require_response && !parsed.has_response) {
    throw CsvError(1, header.size(), "expected final column 'y'");
  }
  if (n_x == 0) throw CsvError(1, 1, "no covariate columns in header");
  for (std::size_t j = 0; j < n_x; ++j) {
    const std::string expected = "x" + std::to_string(j + 1);
    if (trimmed(header[j]) != expected) {
      throw CsvError(1, j + 1, "expected header '" + expected + "', got '" +
                                   trimmed(header[j]) + "'");
    }
  }
  parsed.dimension = static_cast<int>(n_x);

  const std::size_t expected_fields = n_x + (parsed.has_response ? 1 : 0);
  while (std::getline(in, line)) {
    ++row;
    if (trimmed(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != expected_fields) {
      throw CsvError(row, fields.size(),
                     "expected " + std::to_string(expected_fields) +
                         " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> values(expected_fields);
    for (std::size_t j = 0; j < expected_fields; ++j) {
      values[j] = parse_double(fields[j], row, j + 1);
    }
    parsed.rows.push_back(std::move(values));
  }
  if (parsed.rows.empty()) throw CsvError(row + 1, 1, "no data rows");
  return parsed;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
  const ParsedCsv parsed = parse_table(path, /*require_response=*/true);
  Dataset ds;
  const auto n = static_cast<Eigen::Index>(parsed.rows.size());
  ds.x.resize(n, parsed.dimension);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < parsed.dimension; ++j) ds.x(i, j) = parsed.rows[i][j];
    ds.y[i] = parsed.rows[i][parsed.dimension];
  }
  return ds;
}

Eigen::MatrixXd read_points_csv(const std::string& path) {
  const ParsedCsv parsed = parse_table(path, /*require_response=*/false);
  const auto n = static_cast<Eigen::Index>(parsed.rows.size());
  Eigen::MatrixXd points(n, parsed.dimension);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < parsed.dimension; ++j) points(i, j) = parsed.rows[i][j];
  }
  return points;
}

void write_predictions_csv(const std::string& path,
                           const std::vector<std::string>& config_echo,
                           const Eigen::VectorXd& predictions) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const auto& line : config_echo) out << "# " << line << "\n";
  out << "pred,pred_hex\n";
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    out << format_double(predictions[i]) << ','
        << format_double_hex(predictions[i]) << "\n";
  }
  if (!out) throw Error("short write to '" + path + "'");
}

}  // namespace obstacle_ridge
