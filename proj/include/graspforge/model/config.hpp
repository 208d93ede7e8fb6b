#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace graspforge::model {

struct ModelConfig {
  std::uint32_t resolution = 32;
  std::uint32_t latent_dim = 32;
  std::vector<std::uint32_t> channels = {16, 32, 64, 128};
  std::uint32_t kernel_size = 4;
  std::uint32_t stride = 2;
  std::uint32_t padding = 1;
  double gamma = 0.2;
  double lambda = 0.5;
  double alpha_min = 0.0;
  double alpha_max = 0.5;

  /// Throws ConfigError when the architecture does not close up or a
  /// hyperparameter is out of range.
  void validate() const;
  /// Spatial extent after the last encoder convolution.
  std::uint32_t bottleneck_extent() const;

  bool operator==(const ModelConfig&) const = default;
};

struct TrainingConfig {
  std::size_t batch_size = 16;
  int phase1_epochs = 40;
  int phase2_epochs = 10;
  double phase1_learning_rate = 1e-3;
  double ae_learning_rate = 1e-4;
  double critic_learning_rate = 1e-3;
  /// Measure training-set IoU every this many epochs (the last epoch of each
  /// phase is always measured); 0 measures only at phase ends.
  int iou_every = 1;

  void validate() const;
  bool operator==(const TrainingConfig&) const = default;
};

nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const TrainingConfig& c);
/// Missing keys keep their defaults; unknown keys and wrong types are ConfigErrors.
ModelConfig model_config_from_json(const nlohmann::json& j);
TrainingConfig training_config_from_json(const nlohmann::json& j);

// Sidecar written next to a checkpoint: the model config, the training config
// and the training seed.
struct ModelSidecar {
  ModelConfig model;
  TrainingConfig training;
  std::uint64_t seed = 0;
  /// Which phases produced the checkpoint: "init", "ae" or "ae-critic".
  std::string stage = "init";
};

nlohmann::json to_json(const ModelSidecar& s);
ModelSidecar sidecar_from_json(const nlohmann::json& j);
std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint);
void save_sidecar(const ModelSidecar& s, const std::filesystem::path& checkpoint);
ModelSidecar load_sidecar(const std::filesystem::path& checkpoint);

}  // namespace graspforge::model
