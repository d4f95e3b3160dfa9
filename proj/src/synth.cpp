#include <cmath>

#include "laser/error.hpp"
#include "laser/reports.hpp"
#include "laser/rng.hpp"

namespace laser {

namespace {

Vector random_unit(Rng& rng, Eigen::Index dim) {
  Vector v(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.normal();
  } while (v.norm() == 0.0);
  return v / v.norm();
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

SynthResult synthesize(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ConfigError("synthetic spec must be a JSON object");
  try {
    const int n_layers = get_or(spec, "n_layers", 1);
    const int dim = spec.at("dim").get<int>();
    const auto seed = get_or<std::uint64_t>(spec, "seed", 0);
    const double noise = get_or(spec, "noise", 0.0);
    const double mean_scale = get_or(spec, "mean_scale", 1.0);
    const bool orthogonal = get_or(spec, "orthogonal_means", false);
    const int unannotated = get_or(spec, "unannotated", 0);
    const std::string corpus_id = get_or<std::string>(spec, "corpus_id", "SYN");
    if (n_layers < 1 || dim < 1) throw ConfigError("synthetic spec: n_layers and dim must be positive");
    if (noise < 0 || unannotated < 0) throw ConfigError("synthetic spec: noise and unannotated must be >= 0");

    std::vector<double> magnitudes(static_cast<std::size_t>(n_layers), 0.0);
    double spread = 0.0;
    nlohmann::json spike_dir_spec = "random";
    if (spec.contains("spike")) {
      const auto& sp = spec.at("spike");
      if (sp.contains("magnitude")) {
        const auto& mag = sp.at("magnitude");
        if (mag.is_array()) {
          if (mag.size() != static_cast<std::size_t>(n_layers)) {
            throw ConfigError("synthetic spec: spike.magnitude array must have n_layers entries");
          }
          for (int l = 0; l < n_layers; ++l) magnitudes[static_cast<std::size_t>(l)] = mag.at(static_cast<std::size_t>(l)).get<double>();
        } else {
          std::fill(magnitudes.begin(), magnitudes.end(), mag.get<double>());
        }
      }
      spread = get_or(sp, "spread", 0.0);
      if (sp.contains("direction")) spike_dir_spec = sp.at("direction");
    }

    Rng rng(seed);
    Vector spike_dir;
    if (spike_dir_spec.is_number_integer()) {
      const int axis = spike_dir_spec.get<int>();
      if (axis < 0 || axis >= dim) throw ConfigError("synthetic spec: spike axis out of range");
      spike_dir = Vector::Zero(dim);
      spike_dir(axis) = 1.0;
    } else if (spike_dir_spec == "random") {
      spike_dir = random_unit(rng, dim);
    } else {
      throw ConfigError("synthetic spec: spike.direction must be \"random\" or an axis index");
    }

    EmbeddingDataset ds;
    std::vector<Vector> row_means;
    nlohmann::json truth_means = nlohmann::json::object();
    int sense_counter = 0;
    int sentence = 0;
    for (const auto& lem : spec.value("lemmas", nlohmann::json::array())) {
      const auto lemma = lem.at("lemma").get<std::string>();
      const Pos pos = parse_pos(get_or<std::string>(lem, "pos", "NOUN"));
      for (const auto& sense : lem.at("senses")) {
        const auto key = sense.at("key").get<std::string>();
        const int count = sense.at("count").get<int>();
        if (count < 0) throw ConfigError("synthetic spec: negative sense count");
        Vector mean;
        if (orthogonal) {
          if (sense_counter >= dim) throw ConfigError("synthetic spec: orthogonal_means needs dim >= number of senses");
          mean = Vector::Zero(dim);
          mean(sense_counter) = 1.0;
        } else {
          mean = random_unit(rng, dim);
        }
        ++sense_counter;
        truth_means[key] = std::vector<double>(mean.data(), mean.data() + mean.size());
        for (int i = 0; i < count; ++i) {
          Occurrence o;
          o.corpus_id = corpus_id;
          o.sentence_idx = sentence++;
          o.token_idx = 0;
          o.surface = lemma;
          o.lemma = lemma;
          o.pos = pos;
          o.sense_key = key;
          ds.occurrences.push_back(std::move(o));
          row_means.push_back(mean_scale * mean);
        }
      }
    }
    for (int i = 0; i < unannotated; ++i) {
      Occurrence o;
      o.corpus_id = corpus_id;
      o.sentence_idx = sentence++;
      o.token_idx = 0;
      o.surface = "filler" + std::to_string(i % 50);
      o.lemma = o.surface;
      o.pos = Pos::Other;
      ds.occurrences.push_back(std::move(o));
      row_means.push_back(mean_scale * random_unit(rng, dim));
    }
    for (std::size_t i = 0; i < ds.occurrences.size(); ++i) ds.occurrences[i].occ_id = static_cast<int>(i);
    assign_frequency_ranks(ds.occurrences);

    const auto n = static_cast<Eigen::Index>(ds.occurrences.size());
    const double noise_scale = noise / std::sqrt(static_cast<double>(dim));
    for (int l = 0; l < n_layers; ++l) {
      LayerMatrix layer{l, Matrix(n, dim)};
      const double magnitude = magnitudes[static_cast<std::size_t>(l)];
      for (Eigen::Index r = 0; r < n; ++r) {
        const double c = magnitude * (1.0 + spread * rng.normal());
        Vector row = row_means[static_cast<std::size_t>(r)] + c * spike_dir;
        for (Eigen::Index d = 0; d < dim; ++d) row(d) += noise_scale * rng.normal();
        // Stored values are the float32-rounded ones so that in-memory and
        // on-disk datasets agree exactly.
        for (Eigen::Index d = 0; d < dim; ++d) layer.data(r, d) = static_cast<double>(static_cast<float>(row(d)));
      }
      ds.layers.push_back(std::move(layer));
    }

    ds.manifest.model_name = get_or<std::string>(spec, "model_name", "synthetic");
    ds.manifest.n_layers = n_layers;
    ds.manifest.dim = dim;
    ds.manifest.n_occurrences = static_cast<int>(n);
    ds.manifest.extra = {{"source", "synth"}};

    SynthResult result;
    result.dataset = std::move(ds);
    result.truth = {{"spec", spec},
                    {"sense_means", truth_means},
                    {"spike_direction", std::vector<double>(spike_dir.data(), spike_dir.data() + spike_dir.size())},
                    {"spike_magnitudes", magnitudes}};
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
}

}  // namespace laser
