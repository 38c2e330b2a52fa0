#include "obstacle_ridge/gram.hpp"

#include <Eigen/Cholesky>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "obstacle_ridge/seeding.hpp"
#include "obstacle_ridge/threading.hpp"

namespace obstacle_ridge {

namespace {
constexpr double kFastPathMargin = 1.0 + 1e-9;

// Mean of min(G(xi, .), gamma) over the sphere of radius R around xj.
double one_sided_mean(const GreenKernel& kernel, const ConstVecRef& xi,
                      const ConstVecRef& xj, double gamma, double radius,
                      const SphereQuadrature& q) {
  const Eigen::MatrixXd& u = q.nodes();
  const Eigen::Index n = u.rows();
  std::vector<double> vals(static_cast<std::size_t>(n));
  Eigen::VectorXd point(xj.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    point = xj + radius * u.row(k).transpose();
    vals[static_cast<std::size_t>(k)] =
        q.weights()[k] * std::min(kernel.eval(xi, point), gamma);
  }
  return pairwise_sum(vals);
}

// Rounding can leave a factorizable pivot on an exactly singular matrix, so
// success additionally requires every pivot to clear a rank-test threshold.
bool cholesky_ok(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const double floor = static_cast<double>(m.rows()) *
                       std::numeric_limits<double>::epsilon() *
                       m.diagonal().maxCoeff();
  const double min_pivot = llt.matrixLLT().diagonal().minCoeff();
  return min_pivot * min_pivot > floor;
}
}  // namespace

double gram_entry_quadrature(const GreenKernel& kernel, const ConstVecRef& xi,
                             const ConstVecRef& xj, double gamma,
                             const SphereQuadrature& q) {
  if (!(gamma > 0.0)) throw ParamError("gram_entry requires gamma > 0");
  const double radius = kernel.level_radius(gamma);
  // Average the two boundary means: the analytic value is symmetric in (i, j),
  // so this cancels the first-order quadrature asymmetry.
  return 0.5 * (one_sided_mean(kernel, xi, xj, gamma, radius, q) +
                one_sided_mean(kernel, xj, xi, gamma, radius, q));
}

double gram_entry(const GreenKernel& kernel, const ConstVecRef& xi,
                  const ConstVecRef& xj, double gamma,
                  const SphereQuadrature& q) {
  if (!(gamma > 0.0)) throw ParamError("gram_entry requires gamma > 0");
  const double dist = (xi - xj).norm();
  if (dist == 0.0) return gamma;
  const double radius = kernel.level_radius(gamma);
  if (dist >= 2.0 * radius * kFastPathMargin) {
    // Obstacles disjoint: the truncated kernel is harmonic on the integration
    // sphere, so the boundary mean collapses to the kernel value.
    return kernel.eval(xi, xj);
  }
  return gram_entry_quadrature(kernel, xi, xj, gamma, q);
}

GramMatrix assemble_gram(const GreenKernel& kernel, const Eigen::MatrixXd& points,
                         double gamma, const SphereQuadrature& q) {
  if (!(gamma > 0.0)) throw ParamError("assemble_gram requires gamma > 0");
  const Eigen::Index n = points.rows();
  if (n < 1) throw ShapeError("assemble_gram requires at least one point");
  if (points.cols() != kernel.dimension()) {
    throw ShapeError("points have dimension " + std::to_string(points.cols()) +
                     ", kernel expects " + std::to_string(kernel.dimension()));
  }

  GramMatrix gm;
  gm.gamma = gamma;
  gm.entries.resize(n, n);
  const double radius = kernel.level_radius(gamma);
  const double fast_cutoff = 2.0 * radius * kFastPathMargin;

  std::vector<std::int64_t> fast_per_row(static_cast<std::size_t>(n), 0);
  parallel_for(n, [&](std::int64_t i) {
    gm.entries(i, i) = gamma;
    const auto xi = points.row(i).transpose();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto xj = points.row(j).transpose();
      const double dist = (xi - xj).norm();
      double value;
      if (dist == 0.0) {
        value = gamma;
      } else if (dist >= fast_cutoff) {
        value = kernel.eval(xi, xj);
        ++fast_per_row[static_cast<std::size_t>(i)];
      } else {
        value = gram_entry_quadrature(kernel, xi, xj, gamma, q);
      }
      gm.entries(i, j) = value;
    }
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) gm.entries(j, i) = gm.entries(i, j);

  gm.fast_path_count = 0;
  for (auto c : fast_per_row) gm.fast_path_count += c;
  return gm;
}

double find_psd_jitter(const Eigen::MatrixXd& entries, double gamma) {
  if (!entries.allFinite()) {
    throw FactorizationError("matrix has non-finite entries");
  }
  if (cholesky_ok(entries)) return 0.0;
  for (int k = -12; k <= -3; ++k) {
    const double tau = std::pow(10.0, k) * gamma;
    Eigen::MatrixXd shifted = entries;
    shifted.diagonal().array() += tau;
    if (cholesky_ok(shifted)) return tau;
  }
  throw FactorizationError("matrix not positive definite after jitter up to 1e-3 gamma");
}

GramMatrix psd_jitter(const GramMatrix& gm) {
  const double tau = find_psd_jitter(gm.entries, gm.gamma);
  GramMatrix out = gm;
  out.applied_jitter = tau;
  if (tau > 0.0) out.entries.diagonal().array() += tau;
  return out;
}

namespace {
constexpr char kMagic[4] = {'O', 'G', 'R', 'M'};
constexpr std::uint32_t kVersion = 1;

void append_bytes(std::uint64_t& hash, const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ULL;  // FNV-1a
  }
}
}  // namespace

std::uint64_t gram_cache_key(const Eigen::MatrixXd& points, double gamma,
                             const SphereQuadrature& q) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const std::uint64_t rows = static_cast<std::uint64_t>(points.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(points.cols());
  append_bytes(hash, &rows, sizeof rows);
  append_bytes(hash, &cols, sizeof cols);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      const double v = points(i, j);
      append_bytes(hash, &v, sizeof v);
    }
  }
  append_bytes(hash, &gamma, sizeof gamma);
  const std::string desc = q.descriptor();
  append_bytes(hash, desc.data(), desc.size());
  return hash;
}

void save_gram(const std::string& path, const GramMatrix& gm) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  const std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  const std::uint64_t n = static_cast<std::uint64_t>(gm.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&gm.gamma), sizeof gm.gamma);
  for (Eigen::Index i = 0; i < gm.size(); ++i) {
    for (Eigen::Index j = i; j < gm.size(); ++j) {
      const double v = gm.entries(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  if (!out) throw Error("short write to '" + path + "'");
}

GramMatrix load_gram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error("'" + path + "' is not an OGRM file");
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!in || version != kVersion) {
    throw Error("unsupported OGRM version in '" + path + "'");
  }
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  GramMatrix gm;
  in.read(reinterpret_cast<char*>(&gm.gamma), sizeof gm.gamma);
  if (!in) throw Error("truncated OGRM header in '" + path + "'");
  const Eigen::Index size = static_cast<Eigen::Index>(n);
  gm.entries.resize(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = i; j < size; ++j) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      gm.entries(i, j) = v;
      gm.entries(j, i) = v;
    }
  }
  if (!in) throw Error("truncated OGRM payload in '" + path + "'");
  return gm;
}

}  // namespace obstacle_ridge
