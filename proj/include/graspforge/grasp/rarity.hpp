#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace graspforge::grasp {

using FeatureVector = std::vector<double>;

struct RarityConfig {
  std::size_t k = 5;
  double distance_floor = 1e-9;  // stands in for zero distances between duplicates

  void validate() const;
  bool operator==(const RarityConfig&) const = default;
};

nlohmann::json to_json(const RarityConfig& c);
RarityConfig rarity_config_from_json(const nlohmann::json& j);

struct Neighbor {
  std::size_t index;
  double distance;  // already floored
};

using NeighborLists = std::vector<std::vector<Neighbor>>;

/// Exact k nearest neighbors of every item by Euclidean distance, self
/// excluded, ordered by distance with ties going to the lower index.
/// Throws ConfigError unless 0 < k < count, DimensionError on ragged input.
NeighborLists knn(const std::vector<FeatureVector>& features, std::size_t k, double distance_floor = 1e-9);

/// D(O) = 1 / mean distance to the neighbors.
double local_reachability_density(const std::vector<Neighbor>& neighbors, double distance_floor = 1e-9);

/// R(O) = mean over P in N_k(O) of D(P) / D(O), one value per input item.
std::vector<double> rarity(const std::vector<FeatureVector>& features, const RarityConfig& config = {});

/// Same, keyed by id. `ids` and `features` are parallel.
std::map<std::string, double> rarity_by_id(const std::vector<std::string>& ids,
                                           const std::vector<FeatureVector>& features,
                                           const RarityConfig& config = {});

}  // namespace graspforge::grasp
