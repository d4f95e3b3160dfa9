#include "laser/anisotropy.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "laser/error.hpp"
#include "laser/rng.hpp"

namespace laser {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

double cosine(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("cosine: dimension mismatch");
  const double nx = norm(x);
  const double ny = norm(y);
  if (nx == 0.0 || ny == 0.0) throw DegenerateInput("cosine: zero-norm vector");
  return clamp_unit(dot(x, y) / (nx * ny));
}

double random_pair_baseline(const LayerMatrix& layer, std::size_t k, std::uint64_t seed, PairingMode mode) {
  const auto n = static_cast<std::size_t>(layer.rows());
  if (k < 2) throw ConfigError("random_pair_baseline: sample size must be at least 2");
  Rng rng(seed);
  const Matrix& m = layer.data;

  if (mode == PairingMode::KPairs) {
    if (n < 2) throw ConfigError("random_pair_baseline: need at least 2 rows for pair sampling");
    double sum = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const auto i = static_cast<Eigen::Index>(rng.index(n));
      auto j = static_cast<Eigen::Index>(rng.index(n - 1));
      if (j >= i) ++j;
      sum += cosine(row_span(m, i), row_span(m, j));
    }
    return sum / static_cast<double>(k);
  }

  if (k > n) {
    throw ConfigError("random_pair_baseline: sample size " + std::to_string(k) + " exceeds row count " +
                      std::to_string(n));
  }
  auto ids = rng.sample_without_replacement(n, k);
  std::sort(ids.begin(), ids.end());
  std::vector<double> norms(k);
  for (std::size_t a = 0; a < k; ++a) {
    norms[a] = norm(row_span(m, static_cast<Eigen::Index>(ids[a])));
    if (norms[a] == 0.0) throw DegenerateInput("random_pair_baseline: zero-norm row " + std::to_string(ids[a]));
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    const auto xa = row_span(m, static_cast<Eigen::Index>(ids[a]));
    for (std::size_t b = a + 1; b < k; ++b) {
      const auto xb = row_span(m, static_cast<Eigen::Index>(ids[b]));
      sum += clamp_unit(dot(xa, xb) / (norms[a] * norms[b]));
    }
  }
  return sum / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
}

void normalize_sign(Eigen::Ref<Vector> direction) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < direction.size(); ++i) {
    if (std::abs(direction(i)) > std::abs(direction(best))) best = i;
  }
  if (direction.size() > 0 && direction(best) < 0) direction = -direction;
}

PrincipalComponents principal_components(const Matrix& data, Eigen::Index count) {
  const Eigen::Index n = data.rows();
  const Eigen::Index dim = data.cols();
  if (n < 2) throw DegenerateInput("PCA needs at least 2 rows, got " + std::to_string(n));
  const Eigen::Index max_count = std::min(n, dim);
  if (count < 0 || count > max_count) {
    throw ConfigError("requested " + std::to_string(count) + " components but at most " +
                      std::to_string(max_count) + " exist");
  }

  PrincipalComponents pc;
  pc.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - pc.mean.transpose();
  pc.total_variance = centered.squaredNorm();
  if (pc.total_variance == 0.0) throw DegenerateInput("PCA of a rank-0 matrix: all rows are identical");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  pc.singular_values = svd.singularValues();
  const double tol = pc.singular_values(0) * static_cast<double>(std::max(n, dim)) *
                     std::numeric_limits<double>::epsilon();
  pc.effective_rank = 0;
  for (Eigen::Index i = 0; i < pc.singular_values.size(); ++i) {
    if (pc.singular_values(i) > tol) ++pc.effective_rank;
  }

  pc.directions.resize(count, dim);
  for (Eigen::Index j = 0; j < count; ++j) {
    Vector u = svd.matrixV().col(j);
    normalize_sign(u);
    pc.directions.row(j) = u.transpose();
  }
  return pc;
}

AnisotropyProfile pca_profile(const LayerMatrix& layer, Eigen::Index d_top) {
  const Eigen::Index n = layer.rows();
  const Eigen::Index dim = layer.dim();
  const Eigen::Index n_proj = std::min<Eigen::Index>(2, std::min(n, dim));
  const auto pc = principal_components(layer.data, std::max(d_top, n_proj));

  AnisotropyProfile profile;
  profile.layer = layer.layer;
  for (Eigen::Index j = 0; j < d_top; ++j) {
    const double s = pc.singular_values(j);
    profile.explained_variance.push_back(s * s / pc.total_variance);
  }
  profile.top2_projection = Matrix::Zero(n, 2);
  const Matrix centered = layer.data.rowwise() - pc.mean.transpose();
  for (Eigen::Index j = 0; j < n_proj; ++j) {
    profile.top2_projection.col(j) = centered * pc.directions.row(j).transpose();
  }
  return profile;
}

AnisotropyProfile anisotropy_profile(const LayerMatrix& layer, Eigen::Index d_top, std::size_t k,
                                     std::uint64_t seed, PairingMode mode) {
  auto profile = pca_profile(layer, d_top);
  profile.baseline_b = random_pair_baseline(layer, k, seed, mode);
  profile.sample_size = k;
  profile.seed = seed;
  profile.pairing = mode;
  return profile;
}

std::map<int, int> frequency_bands(const std::vector<Occurrence>& occs, int n_bands) {
  if (n_bands < 2) throw ConfigError("frequency_bands: need at least 2 bands");
  std::set<int> ranks;
  for (const auto& o : occs) ranks.insert(o.frequency_rank);
  const std::vector<int> sorted(ranks.begin(), ranks.end());
  const auto total = static_cast<long long>(sorted.size());

  std::map<int, int> band_of_rank;
  for (long long p = 0; p < total; ++p) {
    const auto quantile = static_cast<int>(p * n_bands / total);
    band_of_rank[sorted[static_cast<std::size_t>(p)]] = n_bands - 1 - quantile;
  }
  std::map<int, int> bands;
  for (const auto& o : occs) bands[o.occ_id] = band_of_rank[o.frequency_rank];
  return bands;
}

}  // namespace laser
