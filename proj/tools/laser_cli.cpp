// Command-line front end: synth, analyze, eval, laser, compare, inventory.

#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "laser/error.hpp"
#include "laser/reports.hpp"

namespace {

const std::map<std::string, laser::PairingMode> kPairing = {{"all-pairs", laser::PairingMode::AllPairs},
                                                            {"k-pairs", laser::PairingMode::KPairs}};
const std::map<std::string, laser::SenSimNormalization> kNorm = {
    {"pair-mean", laser::SenSimNormalization::PairMean}, {"literal", laser::SenSimNormalization::Literal}};
const std::map<std::string, laser::CorpusFormat> kFormat = {{"tsv", laser::CorpusFormat::Tsv},
                                                            {"ufsac", laser::CorpusFormat::UfsacXml}};

void add_eval_flags(CLI::App* cmd, laser::EvalOptions& o) {
  cmd->add_option("--k", o.k, "Baseline sample size")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Baseline sampling seed")->capture_default_str();
  cmd->add_option("--pairing", o.pairing, "Baseline pairing: all-pairs or k-pairs")
      ->transform(CLI::CheckedTransformer(kPairing, CLI::ignore_case));
  cmd->add_option("--sensim-norm", o.normalization, "SenSim normalization: pair-mean or literal")
      ->transform(CLI::CheckedTransformer(kNorm, CLI::ignore_case));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropy, sense-similarity analysis and LASeR post-processing for contextual embeddings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", laser::kToolkitVersion);

  std::string dataset, out, config, before, after, spec, corpus;

  laser::AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Per-layer random-pair baseline, PCA spectrum and 2D projections");
  a->add_option("--dataset", dataset, "Dataset directory")->required();
  a->add_option("--out", out, "Output directory")->required();
  a->add_option("--k", analyze.k, "Baseline sample size")->capture_default_str();
  a->add_option("--seed", analyze.seed, "Baseline sampling seed")->capture_default_str();
  a->add_option("--d-top", analyze.d_top, "Principal components reported")->capture_default_str();
  a->add_option("--bands", analyze.bands, "Frequency bands for projections")->capture_default_str();
  a->add_option("--pairing", analyze.pairing, "Baseline pairing: all-pairs or k-pairs")
      ->transform(CLI::CheckedTransformer(kPairing, CLI::ignore_case));

  laser::EvalOptions eval;
  auto* e = app.add_subcommand("eval", "SenSim / InterSim / delta per layer, vanilla and adjusted");
  e->add_option("--dataset", dataset, "Dataset directory")->required();
  e->add_option("--out", out, "Output directory")->required();
  add_eval_flags(e, eval);

  auto* l = app.add_subcommand("laser", "Remove top principal components and retrofit same-sense occurrences");
  l->add_option("--dataset", dataset, "Dataset directory")->required();
  l->add_option("--config", config, "LASeR config JSON")->required();
  l->add_option("--out", out, "Output dataset directory")->required();

  laser::CompareOptions compare;
  auto* c = app.add_subcommand("compare", "Before/after tables for two datasets with the same occurrences");
  c->add_option("--before", before, "Dataset directory before post-processing")->required();
  c->add_option("--after", after, "Dataset directory after post-processing")->required();
  c->add_option("--out", out, "Output directory")->required();
  c->add_option("--d-top", compare.d_top, "Principal components reported")->capture_default_str();
  add_eval_flags(c, compare.eval);

  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset from a JSON description");
  s->add_option("--spec", spec, "Synthetic spec JSON")->required();
  s->add_option("--out", out, "Output dataset directory")->required();

  laser::CorpusFormat format = laser::CorpusFormat::Tsv;
  auto* inv = app.add_subcommand("inventory", "Load a sense-annotated corpus and print its multi-sense summary");
  inv->add_option("--corpus", corpus, "Corpus file")->required();
  inv->add_option("--format", format, "tsv or ufsac")->transform(CLI::CheckedTransformer(kFormat, CLI::ignore_case));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? laser::kExitOk : laser::kExitConfig;
  }

  try {
    if (*a) {
      laser::cmd_analyze(dataset, out, analyze);
    } else if (*e) {
      laser::cmd_eval(dataset, out, eval);
    } else if (*l) {
      laser::cmd_laser(dataset, config, out);
    } else if (*c) {
      laser::cmd_compare(before, after, out, compare);
    } else if (*s) {
      laser::cmd_synth(spec, out);
    } else if (*inv) {
      const auto occs = laser::load_corpus(corpus, format);
      const auto inventory = laser::build_inventory(occs, laser::kContentPos);
      const auto summary = laser::summarize_by_pos(occs, inventory);
      nlohmann::json j = {{"occurrences", occs.size()},
                          {"multi_sense_lemmas", inventory.by_lemma.size()},
                          {"senses", inventory.by_sense.size()},
                          {"retained_occurrences", inventory.retained_count()}};
      for (const auto& [pos, n] : summary.lemma_types) j["lemma_types_by_pos"][std::string(laser::to_string(pos))] = n;
      for (const auto& [pos, n] : summary.occurrences) j["occurrences_by_pos"][std::string(laser::to_string(pos))] = n;
      std::cout << j.dump(2) << "\n";
    }
  } catch (const laser::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return laser::kExitConfig;
  } catch (const laser::DataError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return laser::kExitData;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return laser::kExitInternal;
  }
  return laser::kExitOk;
}
