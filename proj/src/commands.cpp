#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "laser/error.hpp"
#include "laser/reports.hpp"

namespace laser {

namespace fs = std::filesystem;

namespace {

const char* to_string(PairingMode m) { return m == PairingMode::AllPairs ? "all_pairs" : "k_pairs"; }
const char* to_string(SenSimNormalization n) { return n == SenSimNormalization::PairMean ? "pair_mean" : "literal"; }

nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct CsvRow {
  std::ostringstream out;
  bool first = true;
  CsvRow& operator<<(const std::string& s) {
    if (!first) out << ',';
    first = false;
    out << s;
    return *this;
  }
  CsvRow& operator<<(double v) { return *this << format_double(v); }
  CsvRow& operator<<(long long v) { return *this << std::to_string(v); }
  CsvRow& operator<<(int v) { return *this << std::to_string(v); }
  std::string str() const { return out.str() + "\n"; }
};

// CSV field quoting for free-text keys.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json to_json(const AnalyzeOptions& o) {
  return {{"k", o.k}, {"seed", o.seed}, {"d_top", o.d_top}, {"bands", o.bands}, {"pairing", to_string(o.pairing)}};
}

nlohmann::json to_json(const EvalOptions& o) {
  std::vector<std::string> pos;
  for (const Pos p : o.pos) pos.emplace_back(to_string(p));
  return {{"k", o.k},
          {"seed", o.seed},
          {"pairing", to_string(o.pairing)},
          {"normalization", to_string(o.normalization)},
          {"pos", pos}};
}

std::vector<double> layer_baselines(const EmbeddingDataset& ds, std::size_t k, std::uint64_t seed, PairingMode mode) {
  std::vector<double> out;
  for (const auto& layer : ds.layers) out.push_back(random_pair_baseline(layer, k, seed, mode));
  return out;
}

std::string metrics_csv(const MetricsReport& report) {
  std::string text = "layer,scope,key,m,sen_sim,sen_sim_adj,inter_sim,inter_sim_adj,delta\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : report.layers) {
    auto row = [&](const char* key, int m, double sen, double sen_adj, double inter, double inter_adj, double delta) {
      CsvRow r;
      r << s.layer << "layer" << key << m << sen << sen_adj << inter << inter_adj << delta;
      text += r.str();
    };
    row("macro", s.n_senses, s.sen_sim, s.sen_sim_adjusted, s.inter_sim, s.inter_sim_adjusted, s.delta);
    row("word_mean", s.n_words, s.sen_sim_word_mean, s.sen_sim_word_mean - s.baseline_b, nan, nan, nan);
    row("occurrence_weighted", s.n_senses, s.sen_sim_occurrence_weighted,
        s.sen_sim_occurrence_weighted - s.baseline_b, nan, nan, nan);
    for (const auto& w : report.words) {
      if (w.layer != s.layer) continue;
      CsvRow r;
      r << w.layer << "word" << csv_field(w.lemma) << w.n_occurrences << w.mean_sen_sim << w.mean_sen_sim_adjusted
        << w.inter_sim << w.inter_sim_adjusted << w.delta;
      text += r.str();
    }
    for (const auto& e : report.senses) {
      if (e.layer != s.layer) continue;
      CsvRow r;
      r << e.layer << "sense" << csv_field(e.sense_key) << e.m << e.sen_sim << e.sen_sim_adjusted << nan << nan << nan;
      text += r.str();
    }
  }
  return text;
}

nlohmann::json metrics_json(const MetricsReport& report) {
  nlohmann::json j;
  j["layers"] = nlohmann::json::array();
  for (const auto& s : report.layers) {
    j["layers"].push_back({{"layer", s.layer},
                           {"baseline_b", s.baseline_b},
                           {"n_senses", s.n_senses},
                           {"n_words", s.n_words},
                           {"n_skipped", s.n_skipped},
                           {"sen_sim", number_or_null(s.sen_sim)},
                           {"sen_sim_adj", number_or_null(s.sen_sim_adjusted)},
                           {"sen_sim_word_mean", number_or_null(s.sen_sim_word_mean)},
                           {"sen_sim_occurrence_weighted", number_or_null(s.sen_sim_occurrence_weighted)},
                           {"inter_sim", number_or_null(s.inter_sim)},
                           {"inter_sim_adj", number_or_null(s.inter_sim_adjusted)},
                           {"delta", number_or_null(s.delta)}});
  }
  j["words"] = nlohmann::json::array();
  for (const auto& w : report.words) {
    j["words"].push_back({{"layer", w.layer},
                          {"lemma", w.lemma},
                          {"n_senses", w.n_senses},
                          {"n_eligible_senses", w.n_eligible_senses},
                          {"n_occurrences", w.n_occurrences},
                          {"mean_sen_sim", w.mean_sen_sim},
                          {"mean_sen_sim_adj", w.mean_sen_sim_adjusted},
                          {"inter_sim", w.inter_sim},
                          {"inter_sim_adj", w.inter_sim_adjusted},
                          {"delta", w.delta},
                          {"delta_out_of_range", w.delta_out_of_range}});
  }
  j["senses"] = nlohmann::json::array();
  for (const auto& s : report.senses) {
    j["senses"].push_back({{"layer", s.layer},
                           {"sense_key", s.sense_key},
                           {"lemma", s.lemma},
                           {"m", s.m},
                           {"sen_sim", s.sen_sim},
                           {"sen_sim_adj", s.sen_sim_adjusted}});
  }
  j["skipped"] = nlohmann::json::array();
  for (const auto& s : report.skipped) {
    j["skipped"].push_back({{"layer", s.layer}, {"lemma", s.lemma}, {"reason", to_string(s.reason)}, {"detail", s.detail}});
  }
  return j;
}

void cmd_analyze(const fs::path& dataset_dir, const fs::path& out_dir, const AnalyzeOptions& opts) {
  const auto ds = load_dataset(dataset_dir);
  if (opts.d_top < 1) throw ConfigError("--d-top must be at least 1");
  const auto n = static_cast<Eigen::Index>(ds.manifest.n_occurrences);
  const Eigen::Index d_top = std::min<Eigen::Index>(opts.d_top, std::min<Eigen::Index>(n, ds.manifest.dim));
  if (d_top < opts.d_top) {
    std::cerr << "note: d_top clamped to " << d_top << " (min of rows and dimension)\n";
  }
  const auto bands = frequency_bands(ds.occurrences, opts.bands);

  OutputDir out(out_dir);
  std::string summary = "layer,baseline_b";
  for (Eigen::Index j = 0; j < d_top; ++j) summary += ",ev_" + std::to_string(j + 1);
  summary += "\n";

  for (const auto& layer : ds.layers) {
    const auto profile = anisotropy_profile(layer, d_top, opts.k, opts.seed, opts.pairing);
    nlohmann::json pj = {{"layer", profile.layer},
                         {"baseline_b", profile.baseline_b},
                         {"sample_size", profile.sample_size},
                         {"seed", profile.seed},
                         {"pairing", to_string(profile.pairing)},
                         {"d_top", d_top},
                         {"explained_variance", profile.explained_variance}};
    const auto suffix = std::to_string(layer.layer);
    out.write("profile_layer_" + suffix + ".json", pj.dump(2) + "\n");

    std::string csv = "occ_id,x,y,band\n";
    for (Eigen::Index r = 0; r < layer.rows(); ++r) {
      CsvRow row;
      row << static_cast<int>(r) << profile.top2_projection(r, 0) << profile.top2_projection(r, 1)
          << bands.at(static_cast<int>(r));
      csv += row.str();
    }
    out.write("projection_layer_" + suffix + ".csv", csv);

    CsvRow srow;
    srow << layer.layer << profile.baseline_b;
    for (const double ev : profile.explained_variance) srow << ev;
    summary += srow.str();
  }
  out.write("anisotropy_summary.csv", summary);
  auto config = to_json(opts);
  config["d_top_effective"] = d_top;
  out.commit("analyze", config, {dataset_dir});
}

void cmd_eval(const fs::path& dataset_dir, const fs::path& out_dir, const EvalOptions& opts) {
  const auto ds = load_dataset(dataset_dir);
  if (opts.pos.empty()) throw ConfigError("POS restriction must not be empty");
  const auto inventory = build_inventory(ds.occurrences, opts.pos);
  const auto baselines = layer_baselines(ds, opts.k, opts.seed, opts.pairing);
  const auto report = layer_report(ds, inventory, baselines, opts.normalization);

  OutputDir out(out_dir);
  out.write("metrics.csv", metrics_csv(report));
  out.write("metrics.json", metrics_json(report).dump(2) + "\n");

  const auto summary = summarize_by_pos(ds.occurrences, inventory);
  nlohmann::json inv = {{"lemmas", inventory.by_lemma.size()},
                        {"senses", inventory.by_sense.size()},
                        {"retained_occurrences", inventory.retained_count()},
                        {"conflicting_occurrences", inventory.conflicting.size()}};
  for (const auto& [pos, count] : summary.lemma_types) inv["lemma_types_by_pos"][std::string(to_string(pos))] = count;
  for (const auto& [pos, count] : summary.occurrences) inv["occurrences_by_pos"][std::string(to_string(pos))] = count;
  out.write("inventory_summary.json", inv.dump(2) + "\n");
  out.commit("eval", to_json(opts), {dataset_dir});
}

void cmd_laser(const fs::path& dataset_dir, const fs::path& config_path, const fs::path& out_dir) {
  nlohmann::json cfg_json;
  {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config " + config_path.string());
    try {
      cfg_json = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config " + config_path.string() + ": " + e.what());
    }
  }
  const auto cfg = laser_config_from_json(cfg_json);
  const auto ds = load_dataset(dataset_dir);
  const auto inventory = build_inventory(ds.occurrences, kContentPos);

  EmbeddingDataset result;
  result.manifest = ds.manifest;
  result.manifest.extra["postprocess"] = {{"method", "laser"}, {"config", to_json(cfg)}};
  result.occurrences = ds.occurrences;

  nlohmann::json meta = {{"config", to_json(cfg)}, {"layers", nlohmann::json::array()}};
  for (const auto& layer : ds.layers) {
    auto run = run_laser(layer, inventory, cfg);
    nlohmann::json components = nlohmann::json::array();
    for (Eigen::Index j = 0; j < run.removed_components.rows(); ++j) {
      const Vector u = run.removed_components.row(j).transpose();
      components.push_back(std::vector<double>(u.data(), u.data() + u.size()));
    }
    meta["layers"].push_back({{"layer", layer.layer},
                              {"mean_vector", std::vector<double>(run.mean_vector.data(),
                                                                  run.mean_vector.data() + run.mean_vector.size())},
                              {"removed_components", components},
                              {"convergence", run.convergence}});
    result.layers.push_back(std::move(run.q));
  }

  OutputDir out(out_dir);
  save_dataset(result, out.path());
  out.write("laser_meta.json", meta.dump(2) + "\n");
  out.commit("laser", to_json(cfg), {dataset_dir, config_path});
}

void cmd_compare(const fs::path& before_dir, const fs::path& after_dir, const fs::path& out_dir,
                 const CompareOptions& opts) {
  const auto before_tsv = read_text(before_dir / "occurrences.tsv");
  const auto after_tsv = read_text(after_dir / "occurrences.tsv");
  const auto before_digest = sha256_hex(before_tsv);
  const auto after_digest = sha256_hex(after_tsv);
  if (before_digest != after_digest) {
    std::istringstream a(before_tsv), b(after_tsv);
    std::string la, lb, samples;
    int line = 0, shown = 0;
    while (shown < 5) {
      const bool ga = static_cast<bool>(std::getline(a, la));
      const bool gb = static_cast<bool>(std::getline(b, lb));
      if (!ga && !gb) break;
      ++line;
      if (!ga) la = "<missing>";
      if (!gb) lb = "<missing>";
      if (la != lb) {
        samples += "\n  line " + std::to_string(line) + ": before '" + la + "' | after '" + lb + "'";
        ++shown;
      }
    }
    throw DataError("occurrence tables differ (sha256 " + before_digest.substr(0, 12) + " vs " +
                    after_digest.substr(0, 12) + ")" + samples);
  }

  const auto before = load_dataset(before_dir);
  const auto after = load_dataset(after_dir);
  if (before.layers.size() != after.layers.size()) {
    throw DataError("layer counts differ: " + std::to_string(before.layers.size()) + " vs " +
                    std::to_string(after.layers.size()));
  }
  if (opts.d_top < 1) throw ConfigError("--d-top must be at least 1");
  const auto& e = opts.eval;
  const auto inventory = build_inventory(before.occurrences, e.pos);
  const auto base_before = layer_baselines(before, e.k, e.seed, e.pairing);
  const auto base_after = layer_baselines(after, e.k, e.seed, e.pairing);
  const auto rep_before = layer_report(before, inventory, base_before, e.normalization);
  const auto rep_after = layer_report(after, inventory, base_after, e.normalization);

  std::string table = "layer,baseline_before,baseline_after,sen_sim_before,sen_sim_after,sen_sim_adj_before,"
                      "sen_sim_adj_after,inter_sim_before,inter_sim_after,inter_sim_adj_before,inter_sim_adj_after,"
                      "delta_before,delta_after,delta_change\n";
  std::string fig2 = "layer,baseline_before,baseline_after\n";
  std::string fig4 = "layer,component,explained_variance_before,explained_variance_after\n";
  std::string fig6 = "layer,sen_sim_adj_before,sen_sim_adj_after,inter_sim_adj_before,inter_sim_adj_after\n";
  std::string table2 = "layer,vanilla_sen_sim_adj,vanilla_delta,retro_sen_sim_adj,retro_delta\n";
  nlohmann::json rows = nlohmann::json::array();

  for (std::size_t l = 0; l < before.layers.size(); ++l) {
    const auto& b = rep_before.layers[l];
    const auto& a = rep_after.layers[l];
    CsvRow r;
    r << b.layer << b.baseline_b << a.baseline_b << b.sen_sim << a.sen_sim << b.sen_sim_adjusted << a.sen_sim_adjusted
      << b.inter_sim << a.inter_sim << b.inter_sim_adjusted << a.inter_sim_adjusted << b.delta << a.delta
      << a.delta - b.delta;
    table += r.str();

    CsvRow r2;
    r2 << b.layer << b.baseline_b << a.baseline_b;
    fig2 += r2.str();
    CsvRow r6;
    r6 << b.layer << b.sen_sim_adjusted << a.sen_sim_adjusted << b.inter_sim_adjusted << a.inter_sim_adjusted;
    fig6 += r6.str();
    CsvRow rt;
    rt << b.layer << b.sen_sim_adjusted << b.delta << a.sen_sim_adjusted << a.delta;
    table2 += rt.str();

    const auto& lb = before.layers[l];
    const auto& la = after.layers[l];
    const Eigen::Index d_top =
        std::min<Eigen::Index>(opts.d_top, std::min({lb.rows(), lb.dim(), la.dim()}));
    const auto pb = pca_profile(lb, d_top);
    const auto pa = pca_profile(la, d_top);
    for (Eigen::Index j = 0; j < d_top; ++j) {
      CsvRow r4;
      r4 << b.layer << static_cast<int>(j + 1) << pb.explained_variance[static_cast<std::size_t>(j)]
         << pa.explained_variance[static_cast<std::size_t>(j)];
      fig4 += r4.str();
    }

    rows.push_back({{"layer", b.layer},
                    {"baseline_before", b.baseline_b},
                    {"baseline_after", a.baseline_b},
                    {"sen_sim_before", number_or_null(b.sen_sim)},
                    {"sen_sim_after", number_or_null(a.sen_sim)},
                    {"sen_sim_adj_before", number_or_null(b.sen_sim_adjusted)},
                    {"sen_sim_adj_after", number_or_null(a.sen_sim_adjusted)},
                    {"inter_sim_before", number_or_null(b.inter_sim)},
                    {"inter_sim_after", number_or_null(a.inter_sim)},
                    {"inter_sim_adj_before", number_or_null(b.inter_sim_adjusted)},
                    {"inter_sim_adj_after", number_or_null(a.inter_sim_adjusted)},
                    {"delta_before", number_or_null(b.delta)},
                    {"delta_after", number_or_null(a.delta)},
                    {"delta_change", number_or_null(a.delta - b.delta)},
                    {"explained_variance_before", pb.explained_variance},
                    {"explained_variance_after", pa.explained_variance}});
  }

  OutputDir out(out_dir);
  out.write("comparison.csv", table);
  out.write("comparison.json",
            nlohmann::json({{"occurrence_digest", before_digest}, {"layers", rows}}).dump(2) + "\n");
  out.write("fig2_baseline.csv", fig2);
  out.write("fig4_explained_variance.csv", fig4);
  out.write("fig6_sense_relatedness.csv", fig6);
  out.write("table2_sense_similarity.csv", table2);
  auto config = to_json(e);
  config["d_top"] = opts.d_top;
  out.commit("compare", config, {before_dir, after_dir});
}

void cmd_synth(const fs::path& spec_path, const fs::path& out_dir) {
  nlohmann::json spec;
  {
    std::ifstream in(spec_path);
    if (!in) throw ConfigError("cannot read synthetic spec " + spec_path.string());
    try {
      spec = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("synthetic spec " + spec_path.string() + ": " + e.what());
    }
  }
  const auto result = synthesize(spec);
  OutputDir out(out_dir);
  save_dataset(result.dataset, out.path());
  out.write("synth_truth.json", result.truth.dump(2) + "\n");
  out.commit("synth", spec, {spec_path});
}

}  // namespace laser
