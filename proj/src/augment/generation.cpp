#include "graspforge/augment/generation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <thread>

#include "graspforge/core/digest.hpp"
#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"
#include "graspforge/core/json_fields.hpp"
#include "graspforge/geometry/marching_cubes.hpp"
#include "graspforge/model/ae_critic.hpp"

namespace graspforge::augment {

using nlohmann::json;
using json_fields::read;

void AugmentConfig::validate() const {
  if (!(percentile > 0.0 && percentile < 100.0)) throw ConfigError("augment percentile t must lie in (0, 100)");
  if (first_rank < 1) throw ConfigError("augment first neighbor rank N must be at least 1");
  if (alphas.empty()) throw ConfigError("augment alphas must not be empty");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("augment alphas must lie in (0, 1)");
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw ConfigError("augment ratio must be a non-negative number");
  if (!(rejection_outlier_percentage >= 0.0 && rejection_outlier_percentage <= 100.0))
    throw ConfigError("rejection outlier percentage must lie in [0, 100]");
  if (!(iso_level > 0.0 && iso_level < 1.0)) throw ConfigError("iso level must lie in (0, 1)");
  if (smoothing.iterations < 0) throw ConfigError("smoothing iterations must be non-negative");
}

json to_json(const AugmentConfig& c) {
  return json{{"percentile", c.percentile},
              {"first_rank", c.first_rank},
              {"rank_span", c.rank_span},
              {"alphas", c.alphas},
              {"ratio", c.ratio},
              {"rejection_outlier_percentage", c.rejection_outlier_percentage},
              {"iso_level", c.iso_level},
              {"smoothing",
               {{"iterations", c.smoothing.iterations},
                {"alpha", c.smoothing.alpha},
                {"beta", c.smoothing.beta}}}};
}

AugmentConfig augment_config_from_json(const json& j) {
  json_fields::reject_unknown(j,
                              {"percentile", "first_rank", "rank_span", "alphas", "ratio",
                               "rejection_outlier_percentage", "iso_level", "smoothing"},
                              "augment");
  AugmentConfig c;
  read(j, "percentile", c.percentile);
  read(j, "first_rank", c.first_rank);
  read(j, "rank_span", c.rank_span);
  read(j, "alphas", c.alphas);
  read(j, "ratio", c.ratio);
  read(j, "rejection_outlier_percentage", c.rejection_outlier_percentage);
  read(j, "iso_level", c.iso_level);
  if (j.contains("smoothing")) {
    const auto& s = j.at("smoothing");
    json_fields::reject_unknown(s, {"iterations", "alpha", "beta"}, "smoothing");
    read(s, "iterations", c.smoothing.iterations);
    read(s, "alpha", c.smoothing.alpha);
    read(s, "beta", c.smoothing.beta);
  }
  c.validate();
  return c;
}

json to_json(const GenerationPair& p) {
  return json{{"a", p.a}, {"b", p.b}, {"metric", metric_name(p.metric)}, {"rank", p.rank}};
}

GenerationPair generation_pair_from_json(const json& j) {
  try {
    return {j.at("a").get<std::string>(), j.at("b").get<std::string>(),
            metric_from_name(j.at("metric").get<std::string>()), j.at("rank").get<std::size_t>()};
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed generation pair: ") + e.what());
  }
}

json to_json(const Rejection& r) {
  return json{{"id", r.id},
              {"pair", to_json(r.pair)},
              {"alpha", r.alpha},
              {"reason", r.reason},
              {"outlier_percentage", r.outlier_percentage}};
}

std::string generated_id(const GenerationPair& pair, double alpha, const std::string& checkpoint_digest) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", alpha);
  const std::string key = pair.a + '\n' + pair.b + '\n' + buf + '\n' + checkpoint_digest;
  return "gen-" + sha256_hex(key).substr(0, 16);
}

GenerationSettings generation_settings(const AugmentConfig& config, std::size_t jobs) {
  GenerationSettings s;
  s.rejection_outlier_percentage = config.rejection_outlier_percentage;
  s.iso_level = config.iso_level;
  s.smoothing = config.smoothing;
  s.jobs = jobs;
  return s;
}

geometry::VoxelGrid decode_to_lattice(const model::ModelConfig& model, const engine::ParameterSet& params,
                                      const model::LatentVector& z, double voxel_size, double iso) {
  geometry::VoxelGrid decoded = model::decode(model, params, z).thresholded(iso);
  const double half = 0.5 * voxel_size * decoded.resolution();
  return geometry::VoxelGrid(decoded.resolution(), geometry::Vec3::Constant(-half), voxel_size,
                             std::move(decoded.values()));
}

namespace {

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double outlier_percentage(const model::ModelConfig& model, const engine::ParameterSet& params,
                          const model::LatentVector& z, bool& empty) {
  const auto grid = model::decode(model, params, z).thresholded();
  empty = grid.occupied_count() == 0;
  return empty ? 100.0 : geometry::completeness(grid).outlier_percentage;
}

OutlierSummary summarize(const std::vector<double>& values, const std::vector<char>& empty) {
  OutlierSummary s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.mean_outlier_percentage += values[i] / static_cast<double>(values.size());
    s.empty += empty[i];
  }
  return s;
}

struct Job {
  const GenerationPair* pair;
  double alpha;
};

struct Outcome {
  std::optional<GeneratedShape> shape;
  std::optional<Rejection> rejection;
};

}  // namespace

GenerationResult generate_shapes(const std::vector<GenerationPair>& pairs, const std::vector<double>& alphas,
                                 const model::ModelConfig& model, const engine::ParameterSet& params,
                                 const std::map<std::string, geometry::VoxelGrid>& parents,
                                 const std::string& checkpoint_digest, const GenerationSettings& settings) {
  for (double a : alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("interpolation weights must lie in [0, 1]");

  // Each parent is encoded once.
  std::map<std::string, model::LatentVector> latents;
  for (const auto& p : pairs) {
    if (p.a == p.b) throw DataError("generation pair joins '" + p.a + "' with itself");
    for (const auto* id : {&p.a, &p.b}) {
      if (latents.contains(*id)) continue;
      auto it = parents.find(*id);
      if (it == parents.end()) throw DataError("no voxel grid for parent shape '" + *id + "'");
      latents.emplace(*id, model::encode(model, params, it->second));
    }
  }

  std::vector<Job> jobs;
  for (const auto& p : pairs)
    for (double a : alphas) jobs.push_back({&p, a});
  std::vector<Outcome> outcomes(jobs.size());

  auto run = [&](const Job& job) {
    Outcome out;
    const auto& p = *job.pair;
    const std::string id = generated_id(p, job.alpha, checkpoint_digest);
    const double voxel_size = 0.5 * (parents.at(p.a).voxel_size() + parents.at(p.b).voxel_size());
    const auto z = model::interpolate(latents.at(p.a), latents.at(p.b), job.alpha);
    geometry::VoxelGrid grid = decode_to_lattice(model, params, z, voxel_size, settings.iso_level);
    if (grid.occupied_count() == 0) {
      out.rejection = Rejection{id, p, job.alpha, "empty decoded surface: every cell is below the iso level", 100.0};
      return out;
    }
    const auto report = geometry::completeness(grid, settings.dbscan);
    if (report.outlier_percentage > settings.rejection_outlier_percentage) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "outlier percentage %.3f exceeds the cutoff %.3f", report.outlier_percentage,
                    settings.rejection_outlier_percentage);
      out.rejection = Rejection{id, p, job.alpha, buf, report.outlier_percentage};
      return out;
    }
    auto mesh = geometry::marching_cubes(grid, 0.5);
    if (mesh.empty()) {
      out.rejection = Rejection{id, p, job.alpha, "marching cubes produced no surface", report.outlier_percentage};
      return out;
    }
    mesh = geometry::smooth_mesh(mesh, settings.smoothing);
    out.shape = GeneratedShape{id, p, job.alpha, std::move(mesh), std::move(grid), report};
    return out;
  };

  parallel_for(jobs.size(), settings.jobs, [&](std::size_t i) { outcomes[i] = run(jobs[i]); });

  GenerationResult result;
  for (auto& o : outcomes) {
    if (o.shape) result.shapes.push_back(std::move(*o.shape));
    if (o.rejection) result.rejections.push_back(std::move(*o.rejection));
  }
  return result;
}

std::vector<IndexPair> random_index_pairs(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n < 2) throw DataError("random pairs need at least two shapes");
  Rng rng(seed);
  std::vector<IndexPair> pairs;
  for (std::size_t p = 0; p < count; ++p) {
    const auto i = static_cast<std::size_t>(rng.below(n));
    auto j = static_cast<std::size_t>(rng.below(n - 1));
    if (j >= i) ++j;
    pairs.emplace_back(i, j);
  }
  return pairs;
}

std::vector<OutlierSummary> interpolation_outliers(const model::ModelConfig& model,
                                                   const engine::ParameterSet& params,
                                                   const std::vector<geometry::VoxelGrid>& grids,
                                                   const std::vector<IndexPair>& pairs,
                                                   const std::vector<double>& alphas, std::size_t jobs) {
  std::vector<std::size_t> used;
  for (const auto& [i, j] : pairs) {
    if (i >= grids.size() || j >= grids.size()) throw DataError("pair index out of range");
    used.push_back(i);
    used.push_back(j);
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::map<std::size_t, model::LatentVector> z;
  for (auto i : used) z.emplace(i, model::LatentVector{});
  parallel_for(used.size(), jobs, [&](std::size_t t) { z.at(used[t]) = model::encode(model, params, grids[used[t]]); });

  std::vector<OutlierSummary> out;
  for (double alpha : alphas) {
    std::vector<double> values(pairs.size());
    std::vector<char> empty(pairs.size());
    parallel_for(pairs.size(), jobs, [&](std::size_t p) {
      bool e = false;
      values[p] = outlier_percentage(model, params, model::interpolate(z.at(pairs[p].first), z.at(pairs[p].second), alpha), e);
      empty[p] = e;
    });
    out.push_back(summarize(values, empty));
  }
  return out;
}

OutlierSummary reconstruction_outliers(const model::ModelConfig& model, const engine::ParameterSet& params,
                                       const std::vector<geometry::VoxelGrid>& grids,
                                       const std::vector<std::size_t>& indices, std::size_t jobs) {
  std::vector<double> values(indices.size());
  std::vector<char> empty(indices.size());
  parallel_for(indices.size(), jobs, [&](std::size_t p) {
    if (indices[p] >= grids.size()) throw DataError("shape index out of range");
    bool e = false;
    values[p] = outlier_percentage(model, params, model::encode(model, params, grids[indices[p]]), e);
    empty[p] = e;
  });
  return summarize(values, empty);
}

}  // namespace graspforge::augment
