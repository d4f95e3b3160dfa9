#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "laser/corpus.hpp"

namespace laser {

// Row-major so that a row is one contiguous embedding.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Embeddings for one model layer; row i belongs to occ_id i. Values are held
// in double precision and stored on disk as little-endian float32.
struct LayerMatrix {
  int layer = 0;
  Matrix data;

  Eigen::Index rows() const { return data.rows(); }
  Eigen::Index dim() const { return data.cols(); }
};

struct Manifest {
  std::string model_name;
  int n_layers = 0;
  int dim = 0;
  int n_occurrences = 0;
  std::string dtype = "f32le";
  // Keys beyond the fixed schema (e.g. extractor provenance), preserved verbatim.
  nlohmann::json extra = nlohmann::json::object();
};

struct EmbeddingDataset {
  Manifest manifest;
  std::vector<Occurrence> occurrences;
  std::vector<LayerMatrix> layers;
};

// Throws DataError when manifest counts, row counts, dimensions or layer
// numbering disagree, or when any entry is NaN/Inf (or overflows float32).
void validate(const EmbeddingDataset& ds);

// Writes manifest.json, occurrences.tsv and layer_<k>.f32 into `dir`,
// creating it if needed. Output bytes depend only on the dataset contents.
void save_dataset(const EmbeddingDataset& ds, const std::filesystem::path& dir);

EmbeddingDataset load_dataset(const std::filesystem::path& dir);

nlohmann::json manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);

// Raw float32 little-endian codec for one layer.
std::vector<char> encode_f32le(const Matrix& data);
Matrix decode_f32le(const std::vector<char>& bytes, Eigen::Index rows, Eigen::Index cols);

std::string layer_file_name(int layer);

}  // namespace laser
