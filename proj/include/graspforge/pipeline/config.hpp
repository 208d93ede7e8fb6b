#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "graspforge/augment/generation.hpp"
#include "graspforge/grasp/grasp_config.hpp"
#include "graspforge/grasp/rarity.hpp"
#include "graspforge/model/config.hpp"
#include "json.hpp"

namespace graspforge::pipeline {

struct CorpusConfig {
  std::size_t count = 200;  // toy shapes
  bool random_orientation = true;
  double import_size = 0.10;  // longest extent given to imported meshes, meters

  bool operator==(const CorpusConfig&) const = default;
};

struct EvaluateConfig {
  std::vector<double> alphas = {0.0, 0.1, 0.25, 0.5};
  std::size_t pairs = 50;  // random corpus pairs per alpha

  bool operator==(const EvaluateConfig&) const = default;
};

// Everything one experiment needs, as one JSON document. Missing sections and
// keys keep their defaults.
struct PipelineConfig {
  std::uint64_t seed = 7;
  CorpusConfig corpus;
  model::ModelConfig model;
  model::TrainingConfig training;
  grasp::RarityConfig rarity;
  grasp::GraspConfig grasp;
  augment::AugmentConfig augment;
  EvaluateConfig evaluate;

  void validate() const;  // throws ConfigError
  bool operator==(const PipelineConfig&) const = default;
};

nlohmann::json to_json(const PipelineConfig& c);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
/// Reads and validates a config file. Bad JSON is a ConfigError.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace graspforge::pipeline
