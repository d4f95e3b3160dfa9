#include "laser/laser_core.hpp"

#include <algorithm>
#include <cmath>

#include "laser/anisotropy.hpp"
#include "laser/error.hpp"

namespace laser {

SenseGraph::SenseGraph(std::vector<std::vector<int>> groups) : groups_(std::move(groups)) {
  int max_id = -1;
  for (auto& g : groups_) {
    std::sort(g.begin(), g.end());
    for (const int id : g) {
      if (id < 0) throw DataError("sense graph: negative occurrence id");
      max_id = std::max(max_id, id);
    }
  }
  group_index_.assign(static_cast<std::size_t>(max_id + 1), -1);
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    for (const int id : groups_[gi]) {
      auto& slot = group_index_[static_cast<std::size_t>(id)];
      if (slot != -1) throw DataError("sense graph: occurrence " + std::to_string(id) + " in two senses");
      slot = static_cast<int>(gi);
      nodes_.push_back(id);
    }
  }
  std::sort(nodes_.begin(), nodes_.end());
}

bool SenseGraph::contains(int occ_id) const { return group_of(occ_id) >= 0; }

int SenseGraph::group_of(int occ_id) const {
  if (occ_id < 0 || static_cast<std::size_t>(occ_id) >= group_index_.size()) return -1;
  return group_index_[static_cast<std::size_t>(occ_id)];
}

int SenseGraph::degree(int occ_id) const {
  const int g = group_of(occ_id);
  return g < 0 ? 0 : static_cast<int>(groups_[static_cast<std::size_t>(g)].size()) - 1;
}

std::size_t SenseGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& g : groups_) n += g.size() * (g.size() - (g.empty() ? 0 : 1)) / 2;
  return n;
}

std::vector<std::pair<int, int>> SenseGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& g : groups_) {
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = a + 1; b < g.size(); ++b) out.emplace_back(g[a], g[b]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SenseGraph build_sense_graph(const SenseInventory& inventory) {
  std::vector<std::vector<int>> groups;
  for (const auto& [key, ids] : inventory.by_sense) groups.push_back(ids);
  return SenseGraph(std::move(groups));
}

namespace {

BetaScheme parse_beta(const std::string& s) {
  if (s == "inverse_degree") return BetaScheme::InverseDegree;
  if (s == "uniform_one") return BetaScheme::UniformOne;
  throw ConfigError("beta_scheme must be inverse_degree or uniform_one, got '" + s + "'");
}

UpdateMode parse_mode(const std::string& s) {
  if (s == "gauss_seidel") return UpdateMode::GaussSeidel;
  if (s == "jacobi") return UpdateMode::Jacobi;
  if (s == "single_pass") return UpdateMode::SinglePass;
  throw ConfigError("update_mode must be gauss_seidel, jacobi or single_pass, got '" + s + "'");
}

void check(const LaserConfig& cfg) {
  if (cfg.d_remove < 0) throw ConfigError("d_remove must be >= 0");
  if (cfg.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) throw ConfigError("alpha must be a finite nonnegative number");
}

}  // namespace

LaserConfig laser_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("LASeR config must be a JSON object");
  LaserConfig cfg;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& key = it.key();
      const auto& v = it.value();
      if (key == "d_remove") cfg.d_remove = v.get<int>();
      else if (key == "iterations") cfg.iterations = v.get<int>();
      else if (key == "alpha") cfg.alpha = v.get<double>();
      else if (key == "beta_scheme") cfg.beta_scheme = parse_beta(v.get<std::string>());
      else if (key == "update_mode") cfg.update_mode = parse_mode(v.get<std::string>());
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else throw ConfigError("unknown LASeR config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("LASeR config: ") + e.what());
  }
  check(cfg);
  return cfg;
}

nlohmann::json to_json(const LaserConfig& cfg) {
  const char* beta = cfg.beta_scheme == BetaScheme::InverseDegree ? "inverse_degree" : "uniform_one";
  const char* mode = cfg.update_mode == UpdateMode::GaussSeidel ? "gauss_seidel"
                     : cfg.update_mode == UpdateMode::Jacobi    ? "jacobi"
                                                                : "single_pass";
  return {{"d_remove", cfg.d_remove}, {"iterations", cfg.iterations}, {"alpha", cfg.alpha},
          {"beta_scheme", beta},      {"update_mode", mode},          {"seed", cfg.seed}};
}

ComponentRemoval remove_top_components(const LayerMatrix& layer, int d_remove) {
  if (d_remove < 0) throw ConfigError("d_remove must be >= 0");
  const Eigen::Index n = layer.rows();
  const Eigen::Index dim = layer.dim();
  if (n < 1) throw DegenerateInput("cannot center an empty layer");

  ComponentRemoval out;
  out.mean_vector = layer.data.colwise().mean().transpose();
  out.v_prime.layer = layer.layer;
  out.v_prime.data = layer.data.rowwise() - out.mean_vector.transpose();
  out.removed_components.resize(0, dim);
  if (d_remove == 0) return out;

  if (n < 2 || out.v_prime.data.squaredNorm() == 0.0) {
    throw ConfigError("d_remove " + std::to_string(d_remove) + " exceeds effective rank 0");
  }
  if (d_remove > std::min(n, dim)) {
    throw ConfigError("d_remove " + std::to_string(d_remove) + " exceeds min(n, D) = " +
                      std::to_string(std::min(n, dim)));
  }
  const auto pc = principal_components(layer.data, d_remove);
  if (d_remove > pc.effective_rank) {
    throw ConfigError("d_remove " + std::to_string(d_remove) + " exceeds effective rank " +
                      std::to_string(pc.effective_rank));
  }
  out.removed_components = pc.directions;
  const Matrix coeffs = out.v_prime.data * pc.directions.transpose();
  out.v_prime.data -= coeffs * pc.directions;
  return out;
}

RetrofitResult retrofit(const LayerMatrix& v_prime, const SenseGraph& graph, const LaserConfig& cfg) {
  check(cfg);
  const Matrix& anchor = v_prime.data;
  const Eigen::Index dim = anchor.cols();
  for (const int id : graph.nodes()) {
    if (id >= anchor.rows()) {
      throw DataError("sense graph node " + std::to_string(id) + " outside layer with " +
                      std::to_string(anchor.rows()) + " rows");
    }
  }
  if (!anchor.allFinite()) throw DataError("retrofit: non-finite input");

  RetrofitResult result;
  result.q.layer = v_prime.layer;
  result.q.data = anchor;
  Matrix& q = result.q.data;

  const bool inverse = cfg.beta_scheme == BetaScheme::InverseDegree;
  const int sweeps = cfg.update_mode == UpdateMode::SinglePass ? 1 : cfg.iterations;
  const bool in_place = cfg.update_mode == UpdateMode::GaussSeidel;
  const auto& groups = graph.groups();

  std::vector<Vector> group_sum(groups.size());
  Matrix next;
  Vector updated(dim);
  for (int t = 0; t < sweeps; ++t) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      group_sum[g] = Vector::Zero(dim);
      for (const int id : groups[g]) group_sum[g] += q.row(id).transpose();
    }
    if (!in_place) next = q;

    double max_shift = 0.0;
    for (const int id : graph.nodes()) {
      const int deg = graph.degree(id);
      if (deg == 0) continue;
      const auto g = static_cast<std::size_t>(graph.group_of(id));
      Vector neighbours = group_sum[g] - q.row(id).transpose();
      double weight = static_cast<double>(deg);
      if (inverse) {
        neighbours /= static_cast<double>(deg);
        weight = 1.0;
      }
      updated = (neighbours + cfg.alpha * anchor.row(id).transpose()) / (weight + cfg.alpha);
      max_shift = std::max(max_shift, (updated - q.row(id).transpose()).norm());
      if (in_place) {
        group_sum[g] += updated - q.row(id).transpose();
        q.row(id) = updated.transpose();
      } else {
        next.row(id) = updated.transpose();
      }
    }
    if (!in_place) q.swap(next);
    result.convergence.push_back(max_shift);
  }
  return result;
}

LaserOutput run_laser(const LayerMatrix& layer, const SenseInventory& inventory, const LaserConfig& cfg) {
  check(cfg);
  auto removal = remove_top_components(layer, cfg.d_remove);
  auto retro = retrofit(removal.v_prime, build_sense_graph(inventory), cfg);
  LaserOutput out;
  out.v_prime = std::move(removal.v_prime);
  out.q = std::move(retro.q);
  out.removed_components = std::move(removal.removed_components);
  out.mean_vector = std::move(removal.mean_vector);
  out.convergence = std::move(retro.convergence);
  return out;
}

}  // namespace laser
