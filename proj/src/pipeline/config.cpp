#include "graspforge/pipeline/config.hpp"

#include <cmath>
#include <fstream>

#include "graspforge/core/error.hpp"
#include "graspforge/core/json_fields.hpp"

namespace graspforge::pipeline {

using nlohmann::json;
using json_fields::read;

void PipelineConfig::validate() const {
  if (corpus.count == 0) throw ConfigError("corpus count must be positive");
  if (!(corpus.import_size > 0.0) || !std::isfinite(corpus.import_size))
    throw ConfigError("corpus import_size must be a positive length");
  model.validate();
  training.validate();
  rarity.validate();
  grasp.validate();
  augment.validate();
  if (evaluate.alphas.empty()) throw ConfigError("evaluate alphas must not be empty");
  for (double a : evaluate.alphas)
    if (!(a >= 0.0 && a <= 0.5)) throw ConfigError("evaluate alphas must lie in [0, 0.5]");
  if (evaluate.pairs == 0) throw ConfigError("evaluate pairs must be positive");
}

json to_json(const PipelineConfig& c) {
  return json{{"seed", c.seed},
              {"corpus",
               {{"count", c.corpus.count},
                {"random_orientation", c.corpus.random_orientation},
                {"import_size", c.corpus.import_size}}},
              {"model", model::to_json(c.model)},
              {"training", model::to_json(c.training)},
              {"rarity", grasp::to_json(c.rarity)},
              {"grasp", grasp::to_json(c.grasp)},
              {"augment", augment::to_json(c.augment)},
              {"evaluate", {{"alphas", c.evaluate.alphas}, {"pairs", c.evaluate.pairs}}}};
}

PipelineConfig pipeline_config_from_json(const json& j) {
  json_fields::reject_unknown(j, {"seed", "corpus", "model", "training", "rarity", "grasp", "augment", "evaluate"},
                              "pipeline config");
  PipelineConfig c;
  read(j, "seed", c.seed);
  if (j.contains("corpus")) {
    const auto& s = j.at("corpus");
    json_fields::reject_unknown(s, {"count", "random_orientation", "import_size"}, "corpus");
    read(s, "count", c.corpus.count);
    read(s, "random_orientation", c.corpus.random_orientation);
    read(s, "import_size", c.corpus.import_size);
  }
  if (j.contains("model")) c.model = model::model_config_from_json(j.at("model"));
  if (j.contains("training")) c.training = model::training_config_from_json(j.at("training"));
  if (j.contains("rarity")) c.rarity = grasp::rarity_config_from_json(j.at("rarity"));
  if (j.contains("grasp")) c.grasp = grasp::grasp_config_from_json(j.at("grasp"));
  if (j.contains("augment")) c.augment = augment::augment_config_from_json(j.at("augment"));
  if (j.contains("evaluate")) {
    const auto& s = j.at("evaluate");
    json_fields::reject_unknown(s, {"alphas", "pairs"}, "evaluate");
    read(s, "alphas", c.evaluate.alphas);
    read(s, "pairs", c.evaluate.pairs);
  }
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return pipeline_config_from_json(j);
}

}  // namespace graspforge::pipeline
