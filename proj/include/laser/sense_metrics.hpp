#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laser/anisotropy.hpp"
#include "laser/corpus.hpp"
#include "laser/embedding_store.hpp"

namespace laser {

// How a sense's within-sense cosine sum is normalized.
enum class SenSimNormalization {
  PairMean,  // mean over the m(m-1)/2 distinct pairs (default)
  Literal,   // ordered-pair double sum divided by m, as the formula is printed
};

// Mean cosine over all unordered pairs of the listed rows. Summation runs over
// pairs in ascending occ_id order, so the result does not depend on the order
// of `occ_ids`. Throws DataError if fewer than two ids are given.
double sense_similarity(const LayerMatrix& layer, std::span<const int> occ_ids,
                        SenSimNormalization norm = SenSimNormalization::PairMean);

// Mean over unordered sense pairs (a, b) of the mean cross cosine between
// group a and group b. Groups must be nonempty and disjoint, at least two.
double inter_sense_similarity(const LayerMatrix& layer, const std::vector<std::vector<int>>& groups);

// Anisotropy adjustment: subtract the layer's random-pair baseline.
inline double adjust(double value, double baseline_b) { return value - baseline_b; }

struct SenseScore {
  int layer = 0;
  std::string sense_key;
  std::string lemma;
  int m = 0;
  double sen_sim = 0.0;
  double sen_sim_adjusted = 0.0;
};

struct WordScore {
  int layer = 0;
  std::string lemma;
  int n_senses = 0;
  int n_eligible_senses = 0;
  int n_occurrences = 0;
  double inter_sim = 0.0;
  double inter_sim_adjusted = 0.0;
  double mean_sen_sim = 0.0;
  double mean_sen_sim_adjusted = 0.0;
  double delta = 0.0;
  // Set when delta falls outside the nominal [-1, 1] range.
  bool delta_out_of_range = false;
};

enum class SkipReason { None, FewerThanTwoSenses, NoEligibleSense, DegenerateVector };

std::string_view to_string(SkipReason reason);

struct WordOutcome {
  std::optional<WordScore> score;
  std::vector<SenseScore> senses;  // eligible senses only
  SkipReason reason = SkipReason::None;
  std::string detail;
};

// SenSim for each eligible sense, InterSim across all senses, and
// delta = mean SenSim - InterSim for one lemma of the inventory.
WordOutcome word_delta(const LayerMatrix& layer, const SenseInventory& inventory, const std::string& lemma,
                       double baseline_b = 0.0, SenSimNormalization norm = SenSimNormalization::PairMean);

struct LayerSummary {
  int layer = 0;
  double baseline_b = 0.0;
  int n_senses = 0;
  int n_words = 0;
  int n_skipped = 0;
  // Macro average over senses (headline).
  double sen_sim = 0.0;
  double sen_sim_adjusted = 0.0;
  // Average of per-word mean SenSim.
  double sen_sim_word_mean = 0.0;
  // Occurrence-weighted average over senses (weight m).
  double sen_sim_occurrence_weighted = 0.0;
  // Macro averages over words.
  double inter_sim = 0.0;
  double inter_sim_adjusted = 0.0;
  double delta = 0.0;
};

struct SkippedWord {
  int layer = 0;
  std::string lemma;
  SkipReason reason = SkipReason::None;
  std::string detail;
};

struct MetricsReport {
  std::vector<LayerSummary> layers;
  std::vector<SenseScore> senses;
  std::vector<WordScore> words;
  std::vector<SkippedWord> skipped;
};

// One baseline per layer, indexed by layer number.
MetricsReport layer_report(const EmbeddingDataset& ds, const SenseInventory& inventory,
                           const std::vector<double>& baselines,
                           SenSimNormalization norm = SenSimNormalization::PairMean);

MetricsReport layer_report(const EmbeddingDataset& ds, const SenseInventory& inventory,
                           const std::vector<AnisotropyProfile>& profiles,
                           SenSimNormalization norm = SenSimNormalization::PairMean);

}  // namespace laser
