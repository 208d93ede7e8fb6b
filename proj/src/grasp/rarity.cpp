#include "graspforge/grasp/rarity.hpp"

#include <algorithm>
#include <cmath>

#include "graspforge/core/error.hpp"
#include "graspforge/core/json_fields.hpp"

namespace graspforge::grasp {

void RarityConfig::validate() const {
  if (k == 0) throw ConfigError("rarity k must be positive");
  if (!(distance_floor > 0.0) || !std::isfinite(distance_floor))
    throw ConfigError("rarity distance_floor must be a positive finite number");
}

nlohmann::json to_json(const RarityConfig& c) { return {{"k", c.k}, {"distance_floor", c.distance_floor}}; }

RarityConfig rarity_config_from_json(const nlohmann::json& j) {
  json_fields::reject_unknown(j, {"k", "distance_floor"}, "rarity");
  RarityConfig c;
  json_fields::read(j, "k", c.k);
  json_fields::read(j, "distance_floor", c.distance_floor);
  c.validate();
  return c;
}

NeighborLists knn(const std::vector<FeatureVector>& features, std::size_t k, double distance_floor) {
  const std::size_t n = features.size();
  if (k == 0) throw ConfigError("knn: k must be positive");
  if (k >= n)
    throw ConfigError("knn: k = " + std::to_string(k) + " needs more than " + std::to_string(k) + " items, got " +
                      std::to_string(n));
  const std::size_t dim = features.front().size();
  for (const auto& f : features)
    if (f.size() != dim) throw DimensionError("knn: feature vectors differ in length");

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = features[i][c] - features[j][c];
        s += d * d;
      }
      dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
    }

  NeighborLists out(n);
  std::vector<std::size_t> order(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order[w++] = j;
    const double* row = dist.data() + i * n;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [row](std::size_t a, std::size_t b) { return row[a] < row[b] || (row[a] == row[b] && a < b); });
    out[i].reserve(k);
    for (std::size_t r = 0; r < k; ++r) out[i].push_back({order[r], std::max(row[order[r]], distance_floor)});
  }
  return out;
}

double local_reachability_density(const std::vector<Neighbor>& neighbors, double distance_floor) {
  if (neighbors.empty()) throw DataError("local_reachability_density: no neighbors");
  double sum = 0.0;
  for (const auto& nb : neighbors) sum += std::max(nb.distance, distance_floor);
  return 1.0 / (sum / static_cast<double>(neighbors.size()));
}

std::vector<double> rarity(const std::vector<FeatureVector>& features, const RarityConfig& config) {
  config.validate();
  const NeighborLists nbrs = knn(features, config.k, config.distance_floor);
  std::vector<double> density(features.size());
  for (std::size_t i = 0; i < features.size(); ++i)
    density[i] = local_reachability_density(nbrs[i], config.distance_floor);
  std::vector<double> r(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    double s = 0.0;
    for (const auto& nb : nbrs[i]) s += density[nb.index] / density[i];
    r[i] = s / static_cast<double>(nbrs[i].size());
  }
  return r;
}

std::map<std::string, double> rarity_by_id(const std::vector<std::string>& ids,
                                           const std::vector<FeatureVector>& features, const RarityConfig& config) {
  if (ids.size() != features.size()) throw DimensionError("rarity_by_id: ids and features differ in count");
  const std::vector<double> r = rarity(features, config);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (!out.emplace(ids[i], r[i]).second) throw DataError("rarity_by_id: duplicate id '" + ids[i] + "'");
  return out;
}

}  // namespace graspforge::grasp
