#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "graspforge/model/ae_critic.hpp"

namespace graspforge::augment {

enum class Metric { kRarity, kGraspness };

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);  // throws ConfigError

/// Percentile with linear interpolation between order statistics (the
/// "linear" method: rank = t/100 * (n-1)). t in [0, 100].
double linear_percentile(std::vector<double> values, double t);

/// Ids whose score strictly exceeds the t-th percentile of all scores, in id
/// order. Throws ConfigError unless 0 < t < 100, DataError on empty input.
std::vector<std::string> select_high_scoring(const std::map<std::string, double>& scores, double t);

struct GenerationPair {
  std::string a;  // the anchor shape
  std::string b;  // its rank-th nearest selected neighbor
  Metric metric = Metric::kRarity;
  std::size_t rank = 0;

  bool operator==(const GenerationPair&) const = default;
};

/// Pairs every selected shape with its N-th to (N+K)-th nearest selected
/// neighbors in latent space (ranks from 1, self excluded, distance ties to
/// the earlier id). Unordered duplicates keep their first occurrence.
/// Throws DataError when fewer than N+K+1 shapes are selected.
std::vector<GenerationPair> form_generation_pairs(const std::vector<std::string>& selected,
                                                  const std::map<std::string, model::LatentVector>& latents,
                                                  std::size_t first_rank, std::size_t rank_span, Metric metric);

}  // namespace graspforge::augment
