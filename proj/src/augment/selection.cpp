#include "graspforge/augment/selection.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "graspforge/core/error.hpp"

namespace graspforge::augment {

std::string metric_name(Metric m) { return m == Metric::kRarity ? "rarity" : "graspness"; }

Metric metric_from_name(const std::string& name) {
  if (name == "rarity") return Metric::kRarity;
  if (name == "graspness") return Metric::kGraspness;
  throw ConfigError("unknown metric \"" + name + "\" (expected rarity or graspness)");
}

double linear_percentile(std::vector<double> values, double t) {
  if (values.empty()) throw DataError("percentile of an empty list");
  if (!(t >= 0.0 && t <= 100.0)) throw ConfigError("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double rank = t / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<std::string> select_high_scoring(const std::map<std::string, double>& scores, double t) {
  if (!(t > 0.0 && t < 100.0)) throw ConfigError("selection percentile must lie strictly between 0 and 100");
  if (scores.empty()) throw DataError("select_high_scoring: no scores");
  std::vector<double> values;
  for (const auto& [id, s] : scores) values.push_back(s);
  const double cut = linear_percentile(std::move(values), t);
  std::vector<std::string> out;
  for (const auto& [id, s] : scores)
    if (s > cut) out.push_back(id);
  return out;
}

std::vector<GenerationPair> form_generation_pairs(const std::vector<std::string>& selected,
                                                  const std::map<std::string, model::LatentVector>& latents,
                                                  std::size_t first_rank, std::size_t rank_span, Metric metric) {
  if (first_rank == 0) throw ConfigError("first neighbor rank N must be at least 1");
  const std::size_t needed = first_rank + rank_span + 1;
  if (selected.size() < needed)
    throw DataError("pairing with N=" + std::to_string(first_rank) + ", K=" + std::to_string(rank_span) +
                    " needs at least " + std::to_string(needed) + " selected shapes, got " +
                    std::to_string(selected.size()));
  std::vector<const model::LatentVector*> z;
  for (const auto& id : selected) {
    auto it = latents.find(id);
    if (it == latents.end()) throw DataError("no latent vector for selected shape '" + id + "'");
    z.push_back(&it->second);
  }
  const std::size_t n = selected.size();
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < z[i]->size(); ++c) {
      const double d = (*z[i])[c] - (*z[j])[c];
      s += d * d;
    }
    return std::sqrt(s);
  };

  std::vector<GenerationPair> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order.emplace_back(dist(i, j), j);
    std::sort(order.begin(), order.end());
    for (std::size_t rank = first_rank; rank <= first_rank + rank_span; ++rank) {
      const std::size_t j = order[rank - 1].second;
      auto key = std::minmax(selected[i], selected[j]);
      if (!seen.emplace(key.first, key.second).second) continue;
      out.push_back({selected[i], selected[j], metric, rank});
    }
  }
  return out;
}

}  // namespace graspforge::augment
