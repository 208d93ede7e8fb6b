#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "graspforge/engine/optim.hpp"
#include "graspforge/geometry/voxel_grid.hpp"
#include "graspforge/model/config.hpp"
#include "json.hpp"

namespace graspforge::model {

struct EpochRecord {
  int phase = 1;  // 1: autoencoder alone, 2: autoencoder with critic
  int epoch = 0;  // 1-based within the phase
  double ae_loss = 0.0;             // mean over batches of the full autoencoder objective
  double reconstruction_loss = 0.0;  // mean BCE part
  std::optional<double> critic_loss;  // phase 2 only
  std::optional<double> iou;          // mean training-set IoU, when measured
};

struct TrainingReport {
  std::uint64_t seed = 0;
  ModelConfig model;
  TrainingConfig training;
  std::vector<EpochRecord> epochs;
  std::optional<double> phase1_iou;  // after the last phase-1 epoch
  double final_iou = 0.0;
};

nlohmann::json to_json(const TrainingReport& report);

struct TrainResult {
  engine::ParameterSet params;
  TrainingReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Two-phase training. Phase 1 fits the autoencoder on BCE alone; phase 2
/// takes one critic step and one autoencoder step per batch, both computed
/// from the same forward pass. Batches are reshuffled every epoch and the
/// trailing partial batch is dropped. Training starts from `initial` when
/// given, otherwise from a seeded initialization. Phases draw from separate
/// seeded streams, so running phase 2 from a saved phase-1 checkpoint gives
/// the same result as running both at once.
TrainResult train(const std::vector<geometry::VoxelGrid>& corpus, const ModelConfig& model,
                  const TrainingConfig& training, std::uint64_t seed,
                  const std::optional<engine::ParameterSet>& initial = std::nullopt,
                  const EpochCallback& on_epoch = {});

/// Mean over the corpus of IoU(threshold(decode(encode(x))), x).
double mean_reconstruction_iou(const ModelConfig& model, const engine::ParameterSet& params,
                               const std::vector<geometry::VoxelGrid>& corpus);

}  // namespace graspforge::model
