#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "graspforge/augment/selection.hpp"
#include "graspforge/engine/tensor.hpp"
#include "graspforge/geometry/completeness.hpp"
#include "graspforge/geometry/mesh.hpp"
#include "graspforge/geometry/smoothing.hpp"
#include "graspforge/geometry/voxel_grid.hpp"
#include "graspforge/model/config.hpp"
#include "json.hpp"

namespace graspforge::augment {

struct AugmentConfig {
  double percentile = 75.0;    // t
  std::size_t first_rank = 2;  // N
  std::size_t rank_span = 3;   // K
  std::vector<double> alphas = {0.25, 0.5};
  double ratio = 1.0;  // generated : original
  double rejection_outlier_percentage = 20.0;
  double iso_level = 0.5;
  geometry::SmoothingParams smoothing;

  void validate() const;  // throws ConfigError
  bool operator==(const AugmentConfig&) const = default;
};

nlohmann::json to_json(const AugmentConfig& config);
AugmentConfig augment_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GenerationPair& pair);
GenerationPair generation_pair_from_json(const nlohmann::json& j);

/// Content address of a generated shape: hash of both parent ids, alpha and
/// the checkpoint digest.
std::string generated_id(const GenerationPair& pair, double alpha, const std::string& checkpoint_digest);

struct GeneratedShape {
  std::string id;
  GenerationPair pair;
  double alpha = 0.0;
  geometry::TriangleMesh mesh;
  geometry::VoxelGrid grid;  // thresholded, in meters
  geometry::CompletenessReport completeness;
};

struct Rejection {
  std::string id;
  GenerationPair pair;
  double alpha = 0.0;
  std::string reason;
  double outlier_percentage = 0.0;
};

nlohmann::json to_json(const Rejection& r);

struct GenerationResult {
  std::vector<GeneratedShape> shapes;  // pair-major, then alpha order
  std::vector<Rejection> rejections;
};

struct GenerationSettings {
  double rejection_outlier_percentage = 20.0;  // above this a shape is dropped
  double iso_level = 0.5;
  geometry::SmoothingParams smoothing;
  geometry::DbscanParams dbscan;
  std::size_t jobs = 1;
};

GenerationSettings generation_settings(const AugmentConfig& config, std::size_t jobs = 1);

/// Decodes alpha * z(a) + (1 - alpha) * z(b) for every pair and alpha, thresholds
/// the result, meshes and smooths it. The lattice is rescaled to the parents'
/// mean voxel size and centered at the origin, so meshes come out in meters.
/// Alphas may include the endpoints 0 and 1. Parent grids are looked up by id.
GenerationResult generate_shapes(const std::vector<GenerationPair>& pairs, const std::vector<double>& alphas,
                                 const model::ModelConfig& model, const engine::ParameterSet& params,
                                 const std::map<std::string, geometry::VoxelGrid>& parents,
                                 const std::string& checkpoint_digest, const GenerationSettings& settings = {});

/// Thresholded decoding of a latent vector, placed on a centered lattice with
/// the given voxel size.
geometry::VoxelGrid decode_to_lattice(const model::ModelConfig& model, const engine::ParameterSet& params,
                                      const model::LatentVector& z, double voxel_size, double iso = 0.5);

struct OutlierSummary {
  double mean_outlier_percentage = 0.0;
  std::size_t empty = 0;  // decodes with no occupied cell, counted as 100%
};

using IndexPair = std::pair<std::size_t, std::size_t>;

/// `count` ordered pairs of distinct indices below n, drawn with replacement.
std::vector<IndexPair> random_index_pairs(std::size_t n, std::size_t count, std::uint64_t seed);

/// Mean completeness outlier percentage of decode(interpolate(z(i), z(j),
/// alpha)) over the pairs, one summary per alpha.
std::vector<OutlierSummary> interpolation_outliers(const model::ModelConfig& model,
                                                   const engine::ParameterSet& params,
                                                   const std::vector<geometry::VoxelGrid>& grids,
                                                   const std::vector<IndexPair>& pairs,
                                                   const std::vector<double>& alphas, std::size_t jobs = 1);

/// Same measure for plain reconstructions decode(encode(grid)) of the given shapes.
OutlierSummary reconstruction_outliers(const model::ModelConfig& model, const engine::ParameterSet& params,
                                       const std::vector<geometry::VoxelGrid>& grids,
                                       const std::vector<std::size_t>& indices, std::size_t jobs = 1);

}  // namespace graspforge::augment
