#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "laser/corpus.hpp"
#include "laser/embedding_store.hpp"

namespace laser {

// Same-sense graph: every sense group is a clique. Edges are not stored;
// a node's neighbours are the other members of its group.
class SenseGraph {
 public:
  SenseGraph() = default;
  // Each group lists the occ_ids of one sense. Groups must be disjoint.
  explicit SenseGraph(std::vector<std::vector<int>> groups);

  const std::vector<std::vector<int>>& groups() const { return groups_; }
  // Nodes in ascending occ_id order.
  const std::vector<int>& nodes() const { return nodes_; }

  bool contains(int occ_id) const;
  // Index into groups(), or -1 when the node is absent.
  int group_of(int occ_id) const;
  int degree(int occ_id) const;
  std::size_t edge_count() const;

  // Materialized (i, j) pairs with i < j, sorted. Intended for small graphs.
  std::vector<std::pair<int, int>> edges() const;

 private:
  std::vector<std::vector<int>> groups_;
  std::vector<int> nodes_;
  std::vector<int> group_index_;  // by occ_id, -1 when absent
};

SenseGraph build_sense_graph(const SenseInventory& inventory);

enum class BetaScheme { InverseDegree, UniformOne };
enum class UpdateMode { GaussSeidel, Jacobi, SinglePass };

struct LaserConfig {
  int d_remove = 1;
  int iterations = 10;
  double alpha = 1.0;
  BetaScheme beta_scheme = BetaScheme::InverseDegree;
  UpdateMode update_mode = UpdateMode::GaussSeidel;
  std::uint64_t seed = 0;
};

// Parses {d_remove, iterations, alpha, beta_scheme, update_mode, seed}; all
// keys optional. Throws ConfigError on unknown keys or invalid values.
LaserConfig laser_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LaserConfig& cfg);

struct ComponentRemoval {
  LayerMatrix v_prime;
  Matrix removed_components;  // d_remove x D
  Vector mean_vector;
};

// Mean-centers the rows and projects out the top d_remove principal
// directions. d_remove = 0 returns the centered matrix. Throws ConfigError if
// d_remove exceeds the effective rank of the centered matrix.
ComponentRemoval remove_top_components(const LayerMatrix& layer, int d_remove);

struct RetrofitResult {
  LayerMatrix q;
  // Per sweep: max over rows of |q_i(t) - q_i(t-1)|.
  std::vector<double> convergence;
};

// Pulls each graph node toward its same-sense neighbours while anchoring it
// to its own row of v_prime:
//   q_i <- (sum_j beta_ij q_j + alpha v'_i) / (sum_j beta_ij + alpha)
// Rows that are not graph nodes, or have no neighbours, are copied unchanged.
RetrofitResult retrofit(const LayerMatrix& v_prime, const SenseGraph& graph, const LaserConfig& cfg);

struct LaserOutput {
  LayerMatrix v_prime;
  LayerMatrix q;
  Matrix removed_components;
  Vector mean_vector;
  std::vector<double> convergence;
};

LaserOutput run_laser(const LayerMatrix& layer, const SenseInventory& inventory, const LaserConfig& cfg);

}  // namespace laser
