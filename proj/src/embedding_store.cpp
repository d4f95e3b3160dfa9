#include "laser/embedding_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "laser/error.hpp"

namespace laser {

namespace fs = std::filesystem;

namespace {

const char* const kManifestFile = "manifest.json";
const char* const kOccurrenceFile = "occurrences.tsv";

void write_file(const fs::path& path, const std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing or unreadable file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void check_field(const std::string& value, const char* name, const Occurrence& o) {
  if (value.find_first_of("\t\n\r") != std::string::npos) {
    throw DataError("occurrence " + std::to_string(o.occ_id) + ": " + name +
                    " contains a tab or newline and cannot be written as TSV");
  }
}

}  // namespace

std::string layer_file_name(int layer) { return "layer_" + std::to_string(layer) + ".f32"; }

nlohmann::json manifest_to_json(const Manifest& m) {
  nlohmann::json j = m.extra.is_object() ? m.extra : nlohmann::json::object();
  j["model_name"] = m.model_name;
  j["n_layers"] = m.n_layers;
  j["dim"] = m.dim;
  j["n_occurrences"] = m.n_occurrences;
  j["dtype"] = m.dtype;
  return j;
}

Manifest manifest_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("manifest.json: expected a JSON object");
  Manifest m;
  try {
    m.model_name = j.at("model_name").get<std::string>();
    m.n_layers = j.at("n_layers").get<int>();
    m.dim = j.at("dim").get<int>();
    m.n_occurrences = j.at("n_occurrences").get<int>();
    m.dtype = j.at("dtype").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest.json: ") + e.what());
  }
  if (m.dtype != "f32le") throw DataError("manifest.json: unsupported dtype '" + m.dtype + "'");
  if (m.n_layers < 0 || m.dim < 0 || m.n_occurrences < 0) {
    throw DataError("manifest.json: negative count");
  }
  m.extra = nlohmann::json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    if (key != "model_name" && key != "n_layers" && key != "dim" && key != "n_occurrences" && key != "dtype") {
      m.extra[key] = it.value();
    }
  }
  return m;
}

void validate(const EmbeddingDataset& ds) {
  const auto& m = ds.manifest;
  if (static_cast<std::size_t>(m.n_occurrences) != ds.occurrences.size()) {
    throw DataError("manifest n_occurrences " + std::to_string(m.n_occurrences) + " but occurrence table has " +
                    std::to_string(ds.occurrences.size()) + " rows");
  }
  if (static_cast<std::size_t>(m.n_layers) != ds.layers.size()) {
    throw DataError("manifest n_layers " + std::to_string(m.n_layers) + " but dataset has " +
                    std::to_string(ds.layers.size()) + " layers");
  }
  for (std::size_t i = 0; i < ds.occurrences.size(); ++i) {
    const auto& o = ds.occurrences[i];
    if (o.occ_id != static_cast<int>(i)) {
      throw DataError("occurrence at row " + std::to_string(i) + " has occ_id " + std::to_string(o.occ_id));
    }
    check_field(o.corpus_id, "corpus_id", o);
    check_field(o.surface, "surface", o);
    check_field(o.lemma, "lemma", o);
    if (o.sense_key) check_field(*o.sense_key, "sense_key", o);
  }
  for (std::size_t k = 0; k < ds.layers.size(); ++k) {
    const auto& layer = ds.layers[k];
    if (layer.layer != static_cast<int>(k)) {
      throw DataError("layers must be numbered 0..L-1 in order; position " + std::to_string(k) + " holds layer " +
                      std::to_string(layer.layer));
    }
    if (layer.rows() != m.n_occurrences || layer.dim() != m.dim) {
      throw DataError("layer " + std::to_string(k) + " has shape " + std::to_string(layer.rows()) + "x" +
                      std::to_string(layer.dim()) + ", manifest says " + std::to_string(m.n_occurrences) + "x" +
                      std::to_string(m.dim));
    }
    for (Eigen::Index r = 0; r < layer.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.dim(); ++c) {
        const double v = layer.data(r, c);
        if (!std::isfinite(v) || !std::isfinite(static_cast<float>(v))) {
          throw DataError("layer " + std::to_string(k) + " row " + std::to_string(r) + " column " +
                          std::to_string(c) + ": non-finite value");
        }
      }
    }
  }
}

std::vector<char> encode_f32le(const Matrix& data) {
  std::vector<char> bytes(static_cast<std::size_t>(data.size()) * 4);
  std::size_t pos = 0;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(data(r, c)));
      for (int b = 0; b < 4; ++b) bytes[pos++] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
    }
  }
  return bytes;
}

Matrix decode_f32le(const std::vector<char>& bytes, Eigen::Index rows, Eigen::Index cols) {
  Matrix data(rows, cols);
  std::size_t pos = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos++])) << (8 * b);
      }
      data(r, c) = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return data;
}

void save_dataset(const EmbeddingDataset& ds, const fs::path& dir) {
  validate(ds);
  fs::create_directories(dir);
  write_file(dir / kManifestFile, manifest_to_json(ds.manifest).dump(2) + "\n");
  std::ostringstream tsv;
  write_tsv(tsv, ds.occurrences);
  write_file(dir / kOccurrenceFile, tsv.str());
  for (const auto& layer : ds.layers) {
    const auto bytes = encode_f32le(layer.data);
    write_file(dir / layer_file_name(layer.layer), std::string_view(bytes.data(), bytes.size()));
  }
}

EmbeddingDataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("dataset directory not found: " + dir.string());
  EmbeddingDataset ds;
  const auto manifest_bytes = read_file(dir / kManifestFile);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(manifest_bytes.begin(), manifest_bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest.json: ") + e.what());
  }
  ds.manifest = manifest_from_json(j);
  const auto& m = ds.manifest;

  ds.occurrences = load_corpus(dir / kOccurrenceFile, CorpusFormat::Tsv);
  if (ds.occurrences.size() != static_cast<std::size_t>(m.n_occurrences)) {
    throw DataError("manifest n_occurrences " + std::to_string(m.n_occurrences) + " but occurrences.tsv has " +
                    std::to_string(ds.occurrences.size()) + " rows");
  }

  const std::size_t expected = static_cast<std::size_t>(m.n_occurrences) * static_cast<std::size_t>(m.dim) * 4;
  for (int k = 0; k < m.n_layers; ++k) {
    const auto path = dir / layer_file_name(k);
    const auto bytes = read_file(path);
    if (bytes.size() != expected) {
      throw DataError(path.filename().string() + ": expected " + std::to_string(expected) + " bytes, found " +
                      std::to_string(bytes.size()));
    }
    ds.layers.push_back({k, decode_f32le(bytes, m.n_occurrences, m.dim)});
  }
  validate(ds);
  return ds;
}

}  // namespace laser
