#include "laser/sense_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "laser/error.hpp"

namespace laser {

namespace {

std::vector<int> sorted_ids(std::span<const int> ids, const LayerMatrix& layer) {
  std::vector<int> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw DataError("occurrence id listed twice");
  }
  for (const int id : out) {
    if (id < 0 || id >= layer.rows()) {
      throw DataError("occurrence id " + std::to_string(id) + " outside layer with " +
                      std::to_string(layer.rows()) + " rows");
    }
  }
  return out;
}

// Unit-normalized copies of the selected rows.
std::vector<Vector> unit_rows(const LayerMatrix& layer, const std::vector<int>& ids) {
  std::vector<Vector> rows;
  rows.reserve(ids.size());
  for (const int id : ids) {
    const auto span = row_span(layer.data, id);
    double sq = 0.0;
    for (const double v : span) sq += v * v;
    const double n = std::sqrt(sq);
    if (n == 0.0) throw DegenerateInput("zero-norm embedding for occurrence " + std::to_string(id));
    rows.emplace_back(layer.data.row(id).transpose() / n);
  }
  return rows;
}

double unit_cos(const Vector& a, const Vector& b) { return std::clamp(a.dot(b), -1.0, 1.0); }

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

std::string_view to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::None: return "none";
    case SkipReason::FewerThanTwoSenses: return "fewer_than_two_senses";
    case SkipReason::NoEligibleSense: return "no_sense_with_two_occurrences";
    case SkipReason::DegenerateVector: return "zero_norm_vector";
  }
  return "none";
}

double sense_similarity(const LayerMatrix& layer, std::span<const int> occ_ids, SenSimNormalization norm) {
  if (occ_ids.size() < 2) {
    throw DataError("sense_similarity needs at least 2 occurrences, got " + std::to_string(occ_ids.size()));
  }
  const auto ids = sorted_ids(occ_ids, layer);
  const auto rows = unit_rows(layer, ids);
  double sum = 0.0;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) sum += unit_cos(rows[a], rows[b]);
  }
  const auto m = static_cast<double>(rows.size());
  if (norm == SenSimNormalization::Literal) return 2.0 * sum / m;
  return sum / (m * (m - 1.0) / 2.0);
}

double inter_sense_similarity(const LayerMatrix& layer, const std::vector<std::vector<int>>& groups) {
  if (groups.size() < 2) {
    throw DataError("inter_sense_similarity needs at least 2 sense groups, got " + std::to_string(groups.size()));
  }
  std::vector<std::vector<Vector>> unit;
  std::vector<int> all;
  for (const auto& g : groups) {
    if (g.empty()) throw DataError("inter_sense_similarity: empty sense group");
    const auto ids = sorted_ids(g, layer);
    all.insert(all.end(), ids.begin(), ids.end());
    unit.push_back(unit_rows(layer, ids));
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw DataError("inter_sense_similarity: sense groups overlap");
  }

  double pair_sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < unit.size(); ++a) {
    for (std::size_t b = a + 1; b < unit.size(); ++b) {
      double cross = 0.0;
      for (const auto& x : unit[a]) {
        for (const auto& y : unit[b]) cross += unit_cos(x, y);
      }
      pair_sum += cross / (static_cast<double>(unit[a].size()) * static_cast<double>(unit[b].size()));
      ++pairs;
    }
  }
  return pair_sum / static_cast<double>(pairs);
}

WordOutcome word_delta(const LayerMatrix& layer, const SenseInventory& inventory, const std::string& lemma,
                       double baseline_b, SenSimNormalization norm) {
  WordOutcome out;
  const auto it = inventory.by_lemma.find(lemma);
  if (it == inventory.by_lemma.end() || it->second.size() < 2) {
    out.reason = SkipReason::FewerThanTwoSenses;
    out.detail = "lemma not retained with two or more senses";
    return out;
  }

  std::vector<std::vector<int>> groups;
  int n_occ = 0;
  for (const auto& key : it->second) {
    const auto& ids = inventory.by_sense.at(key);
    groups.push_back(ids);
    n_occ += static_cast<int>(ids.size());
  }

  try {
    std::vector<double> sims;
    for (const auto& key : it->second) {
      if (!inventory.sensim_eligible(key)) continue;
      const auto& ids = inventory.by_sense.at(key);
      SenseScore s;
      s.layer = layer.layer;
      s.sense_key = key;
      s.lemma = lemma;
      s.m = static_cast<int>(ids.size());
      s.sen_sim = sense_similarity(layer, ids, norm);
      s.sen_sim_adjusted = adjust(s.sen_sim, baseline_b);
      sims.push_back(s.sen_sim);
      out.senses.push_back(std::move(s));
    }
    if (sims.empty()) {
      out.senses.clear();
      out.reason = SkipReason::NoEligibleSense;
      out.detail = "no sense has at least 2 occurrences";
      return out;
    }

    WordScore w;
    w.layer = layer.layer;
    w.lemma = lemma;
    w.n_senses = static_cast<int>(it->second.size());
    w.n_eligible_senses = static_cast<int>(sims.size());
    w.n_occurrences = n_occ;
    w.mean_sen_sim = mean_of(sims);
    w.inter_sim = inter_sense_similarity(layer, groups);
    std::vector<double> adjusted;
    for (const auto& s : out.senses) adjusted.push_back(s.sen_sim_adjusted);
    w.mean_sen_sim_adjusted = mean_of(adjusted);
    w.inter_sim_adjusted = adjust(w.inter_sim, baseline_b);
    w.delta = w.mean_sen_sim - w.inter_sim;
    w.delta_out_of_range = w.delta < -1.0 || w.delta > 1.0;
    out.score = w;
  } catch (const DegenerateInput& e) {
    out.senses.clear();
    out.score.reset();
    out.reason = SkipReason::DegenerateVector;
    out.detail = e.what();
  }
  return out;
}

MetricsReport layer_report(const EmbeddingDataset& ds, const SenseInventory& inventory,
                           const std::vector<double>& baselines, SenSimNormalization norm) {
  if (baselines.size() != ds.layers.size()) {
    throw DataError("layer_report: " + std::to_string(baselines.size()) + " baselines for " +
                    std::to_string(ds.layers.size()) + " layers");
  }
  MetricsReport report;
  for (const auto& layer : ds.layers) {
    const double b = baselines[static_cast<std::size_t>(layer.layer)];
    std::vector<double> sen, sen_adj, word_sen, inter, inter_adj, delta;
    double weighted = 0.0;
    double weight = 0.0;
    int skipped = 0;
    for (const auto& [lemma, senses] : inventory.by_lemma) {
      auto outcome = word_delta(layer, inventory, lemma, b, norm);
      if (!outcome.score) {
        ++skipped;
        report.skipped.push_back({layer.layer, lemma, outcome.reason, outcome.detail});
        continue;
      }
      for (auto& s : outcome.senses) {
        sen.push_back(s.sen_sim);
        sen_adj.push_back(s.sen_sim_adjusted);
        weighted += s.m * s.sen_sim;
        weight += s.m;
        report.senses.push_back(std::move(s));
      }
      const auto& w = *outcome.score;
      word_sen.push_back(w.mean_sen_sim);
      inter.push_back(w.inter_sim);
      inter_adj.push_back(w.inter_sim_adjusted);
      delta.push_back(w.delta);
      report.words.push_back(w);
    }
    LayerSummary s;
    s.layer = layer.layer;
    s.baseline_b = b;
    s.n_senses = static_cast<int>(sen.size());
    s.n_words = static_cast<int>(word_sen.size());
    s.n_skipped = skipped;
    s.sen_sim = mean_of(sen);
    s.sen_sim_adjusted = mean_of(sen_adj);
    s.sen_sim_word_mean = mean_of(word_sen);
    s.sen_sim_occurrence_weighted = weight > 0 ? weighted / weight : std::numeric_limits<double>::quiet_NaN();
    s.inter_sim = mean_of(inter);
    s.inter_sim_adjusted = mean_of(inter_adj);
    s.delta = mean_of(delta);
    report.layers.push_back(s);
  }
  return report;
}

MetricsReport layer_report(const EmbeddingDataset& ds, const SenseInventory& inventory,
                           const std::vector<AnisotropyProfile>& profiles, SenSimNormalization norm) {
  std::vector<double> baselines(ds.layers.size(), 0.0);
  std::vector<bool> covered(ds.layers.size(), false);
  for (const auto& p : profiles) {
    if (p.layer < 0 || static_cast<std::size_t>(p.layer) >= baselines.size()) {
      throw DataError("profile for unknown layer " + std::to_string(p.layer));
    }
    baselines[static_cast<std::size_t>(p.layer)] = p.baseline_b;
    covered[static_cast<std::size_t>(p.layer)] = true;
  }
  for (std::size_t k = 0; k < covered.size(); ++k) {
    if (!covered[k]) throw DataError("no anisotropy profile for layer " + std::to_string(k));
  }
  return layer_report(ds, inventory, baselines, norm);
}

}  // namespace laser
