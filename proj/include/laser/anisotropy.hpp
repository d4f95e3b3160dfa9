#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "laser/corpus.hpp"
#include "laser/embedding_store.hpp"

namespace laser {

// x.y / (|x||y|), clamped to [-1, 1]. Throws DegenerateInput on a zero-norm
// argument and std::invalid_argument on a dimension mismatch.
double cosine(std::span<const double> x, std::span<const double> y);

inline std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

enum class PairingMode {
  AllPairs,  // k sampled occurrences, mean over all k(k-1)/2 pairs
  KPairs,    // k independently sampled pairs of distinct occurrences
};

// Expected cosine between randomly sampled occurrences of one layer: the
// anisotropy baseline B. Deterministic for a given (layer, k, seed, mode).
double random_pair_baseline(const LayerMatrix& layer, std::size_t k, std::uint64_t seed,
                            PairingMode mode = PairingMode::AllPairs);

// Principal directions of the mean-centered rows, computed by SVD.
struct PrincipalComponents {
  Vector mean;
  Matrix directions;             // count x D, unit rows, sign-normalized
  Vector singular_values;        // all min(n, D) values, descending
  double total_variance = 0.0;   // squared Frobenius norm of the centered matrix
  Eigen::Index effective_rank = 0;
};

// Flips `direction` so its largest-magnitude coordinate (first on ties) is positive.
void normalize_sign(Eigen::Ref<Vector> direction);

// Throws DegenerateInput if n < 2 or the centered matrix is exactly zero.
PrincipalComponents principal_components(const Matrix& data, Eigen::Index count);

struct AnisotropyProfile {
  int layer = 0;
  double baseline_b = 0.0;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  PairingMode pairing = PairingMode::AllPairs;
  std::vector<double> explained_variance;  // descending, length d_top
  Matrix top2_projection;                  // n x 2
};

// Fills explained_variance and top2_projection. d_top must not exceed min(n, D).
AnisotropyProfile pca_profile(const LayerMatrix& layer, Eigen::Index d_top);

// Full profile: PCA fragment plus the random-pair baseline.
AnisotropyProfile anisotropy_profile(const LayerMatrix& layer, Eigen::Index d_top, std::size_t k,
                                     std::uint64_t seed, PairingMode mode = PairingMode::AllPairs);

// Band per occ_id by lemma frequency-rank quantile over the distinct ranks
// present. Band 0 holds the least frequent lemmas, band n_bands-1 the most
// frequent.
std::map<int, int> frequency_bands(const std::vector<Occurrence>& occs, int n_bands);

}  // namespace laser
