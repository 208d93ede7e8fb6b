#pragma once

// The AE-Critic networks.
//
// Convolutions followed by batchnorm carry no bias (batchnorm's shift
// subsumes it).
//
//   encoder: [conv -> batchnorm -> relu] per channel entry, flatten, linear -> z
//   decoder: linear -> relu -> reshape, [transposed conv -> batchnorm -> relu]
//            per channel entry in reverse, the last one to a single channel
//            without batchnorm, then sigmoid
//   critic:  the encoder layout with its own weights, then linear -> relu -> linear -> scalar
//
// Parameter ids are prefixed "enc.", "dec." and "critic.".

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graspforge/engine/autograd.hpp"
#include "graspforge/engine/optim.hpp"
#include "graspforge/geometry/voxel_grid.hpp"
#include "graspforge/model/config.hpp"

namespace graspforge::model {

using LatentVector = std::vector<double>;

/// Fresh parameters: weights uniform in +-sqrt(6 / (fan_in + fan_out)), zero
/// biases, batchnorm scale 1 / shift 0, running mean 0 / variance 1.
engine::ParameterSet initialize_parameters(const ModelConfig& config, std::uint64_t seed);

/// Throws ConfigError unless `params` holds exactly the tensors `config` needs.
void check_parameters(const ModelConfig& config, const engine::ParameterSet& params);

bool is_critic_parameter(std::string_view id);
bool is_autoencoder_parameter(std::string_view id);
/// Batchnorm running statistics are state, not trainable weights.
bool is_running_statistic(std::string_view id);
/// Trainable ids of the autoencoder (critic == false) or the critic (critic == true).
std::vector<std::string> trainable_ids(const engine::ParameterSet& params, bool critic);

struct BatchStatsUpdate {
  std::string layer;  // e.g. "enc.bn0"
  engine::BatchStats stats;
};

// Builds the networks into a graph. In train mode every batchnorm layer
// reports its batch statistics through `updates` (when given).
class NetworkBuilder {
 public:
  NetworkBuilder(const ModelConfig& config, const engine::ParameterSet& params, engine::Graph& graph,
                 engine::BatchNormMode mode, std::vector<BatchStatsUpdate>* updates = nullptr);

  engine::Var encode(engine::Var voxels);   // [N, 1, R, R, R] -> [N, latent]
  engine::Var decode(engine::Var latents);  // [N, latent] -> [N, 1, R, R, R] in (0, 1)
  engine::Var critic(engine::Var voxels);   // [N, 1, R, R, R] -> [N, 1]

 private:
  engine::Var param(const std::string& id);
  engine::Var conv_stack(engine::Var x, const std::string& prefix);
  engine::Var bn(engine::Var x, const std::string& layer);
  engine::Var no_bias(std::size_t channels);

  const ModelConfig& config_;
  const engine::ParameterSet& params_;
  engine::Graph& g_;
  engine::BatchNormMode mode_;
  std::vector<BatchStatsUpdate>* updates_;
};

/// Folds recorded batch statistics into the running statistics, in order.
void apply_batch_stats(engine::ParameterSet& params, const std::vector<BatchStatsUpdate>& updates,
                       const engine::BatchNormParams& bn = {});

/// Stacks grids into an [N, 1, R, R, R] tensor. Throws DimensionError on a resolution mismatch.
engine::Tensor grids_to_tensor(const std::vector<const geometry::VoxelGrid*>& grids, std::uint32_t resolution);

// Inference with frozen parameters (eval-mode batchnorm). Pure and thread-safe.

LatentVector encode(const ModelConfig& config, const engine::ParameterSet& params, const geometry::VoxelGrid& grid);
std::vector<LatentVector> encode_all(const ModelConfig& config, const engine::ParameterSet& params,
                                     const std::vector<geometry::VoxelGrid>& grids);
/// Occupancy probabilities on a unit-cube lattice (origin 0, voxel size 1 / R).
geometry::VoxelGrid decode(const ModelConfig& config, const engine::ParameterSet& params, const LatentVector& z);
std::vector<geometry::VoxelGrid> decode_all(const ModelConfig& config, const engine::ParameterSet& params,
                                            const std::vector<LatentVector>& latents);
double critic_score(const ModelConfig& config, const engine::ParameterSet& params, const geometry::VoxelGrid& grid);

/// alpha * z1 + (1 - alpha) * z2.
LatentVector interpolate(const LatentVector& z1, const LatentVector& z2, double alpha);

}  // namespace graspforge::model
