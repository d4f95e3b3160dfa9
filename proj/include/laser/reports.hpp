#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "laser/anisotropy.hpp"
#include "laser/corpus.hpp"
#include "laser/embedding_store.hpp"
#include "laser/laser_core.hpp"
#include "laser/sense_metrics.hpp"

namespace laser {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitData = 2, kExitConfig = 3, kExitInternal = 4 };

// Shortest decimal text that round-trips to the same double; empty for NaN.
std::string format_double(double v);

std::string sha256_hex(std::string_view bytes);

// Hash of the canonical (sorted-key, compact) JSON dump.
std::string config_hash(const nlohmann::json& config);

// Writes into a temporary sibling directory and renames it into place on
// commit(). Without commit() the temporary directory is removed, so a failed
// command leaves no partial output. An existing target is replaced only if it
// is empty or holds a run_manifest.json from an earlier run.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path target);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  const std::filesystem::path& path() const { return temp_; }
  void write(const std::string& name, std::string_view bytes) const;

  // Adds run_manifest.json and moves the directory to its final location.
  void commit(const std::string& command, const nlohmann::json& config,
              const std::vector<std::filesystem::path>& inputs);

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  bool committed_ = false;
};

struct AnalyzeOptions {
  std::size_t k = 1000;
  std::uint64_t seed = 0;
  int d_top = 10;
  int bands = 4;
  PairingMode pairing = PairingMode::AllPairs;
};

struct EvalOptions {
  std::size_t k = 1000;
  std::uint64_t seed = 0;
  PairingMode pairing = PairingMode::AllPairs;
  SenSimNormalization normalization = SenSimNormalization::PairMean;
  std::set<Pos> pos = kContentPos;
};

struct CompareOptions {
  EvalOptions eval;
  int d_top = 10;
};

nlohmann::json to_json(const AnalyzeOptions& o);
nlohmann::json to_json(const EvalOptions& o);

// Per-layer profile JSON, projection CSV and a summary CSV.
void cmd_analyze(const std::filesystem::path& dataset_dir, const std::filesystem::path& out_dir,
                 const AnalyzeOptions& opts);

// Metrics CSV/JSON with vanilla and adjusted SenSim/InterSim/delta.
void cmd_eval(const std::filesystem::path& dataset_dir, const std::filesystem::path& out_dir,
              const EvalOptions& opts);

// Applies LASeR to every layer and writes the result as a dataset plus laser_meta.json.
void cmd_laser(const std::filesystem::path& dataset_dir, const std::filesystem::path& config_path,
               const std::filesystem::path& out_dir);

// Side-by-side tables for two datasets sharing one occurrence table.
void cmd_compare(const std::filesystem::path& before_dir, const std::filesystem::path& after_dir,
                 const std::filesystem::path& out_dir, const CompareOptions& opts);

void cmd_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir);

// In-memory pieces behind the commands, exposed for tests.
std::vector<double> layer_baselines(const EmbeddingDataset& ds, std::size_t k, std::uint64_t seed,
                                    PairingMode mode);
std::string metrics_csv(const MetricsReport& report);
nlohmann::json metrics_json(const MetricsReport& report);

struct SynthResult {
  EmbeddingDataset dataset;
  nlohmann::json truth;
};

// Builds a dataset from a synthetic description:
//   {model_name, n_layers, dim, seed, noise, mean_scale, orthogonal_means,
//    spike: {magnitude (number or per-layer array), spread, direction ("random" | axis)},
//    lemmas: [{lemma, pos, senses: [{key, count}]}], unannotated, corpus_id}
// Row = mean_scale * sense_mean + c * spike_dir + noise * g / sqrt(dim), with
// g standard normal and c = magnitude * (1 + spread * z), z standard normal.
SynthResult synthesize(const nlohmann::json& spec);

}  // namespace laser
