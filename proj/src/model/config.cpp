#include "graspforge/model/config.hpp"

#include <fstream>
#include <set>

#include "graspforge/core/error.hpp"

namespace graspforge::model {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError(std::string("unknown ") + what + " key \"" + key + "\"");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (resolution < 2) throw ConfigError("model resolution must be at least 2");
  if (latent_dim == 0) throw ConfigError("latent dimension must be positive");
  if (channels.empty()) throw ConfigError("channel schedule must not be empty");
  for (auto c : channels)
    if (c == 0) throw ConfigError("channel counts must be positive");
  if (kernel_size == 0 || stride == 0) throw ConfigError("kernel size and stride must be positive");
  std::uint64_t divisor = 1;
  for (std::size_t i = 0; i < channels.size(); ++i) divisor *= stride;
  if (resolution % divisor != 0)
    throw ConfigError("resolution " + std::to_string(resolution) + " is not divisible by stride^layers = " +
                      std::to_string(divisor));
  // Each convolution must map n to n / stride so the transposed layers invert it.
  std::uint32_t n = resolution;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (n + 2 * padding < kernel_size) throw ConfigError("kernel larger than the padded feature map");
    const std::uint32_t out = (n + 2 * padding - kernel_size) / stride + 1;
    if (out != n / stride || (out - 1) * stride + kernel_size != n + 2 * padding)
      throw ConfigError("kernel " + std::to_string(kernel_size) + ", stride " + std::to_string(stride) +
                        ", padding " + std::to_string(padding) + " do not halve a " + std::to_string(n) +
                        "-cell feature map exactly");
    n = out;
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(alpha_min >= 0.0 && alpha_min <= alpha_max && alpha_max <= 0.5))
    throw ConfigError("alpha range must satisfy 0 <= min <= max <= 0.5");
}

std::uint32_t ModelConfig::bottleneck_extent() const {
  std::uint32_t n = resolution;
  for (std::size_t i = 0; i < channels.size(); ++i) n = (n + 2 * padding - kernel_size) / stride + 1;
  return n;
}

void TrainingConfig::validate() const {
  if (batch_size < 2) throw ConfigError("batch size must be at least 2 (batch normalization)");
  if (phase1_epochs < 0 || phase2_epochs < 0) throw ConfigError("epoch counts must be non-negative");
  if (!(phase1_learning_rate > 0.0 && ae_learning_rate > 0.0 && critic_learning_rate > 0.0))
    throw ConfigError("learning rates must be positive");
  if (iou_every < 0) throw ConfigError("iou_every must be non-negative");
}

json to_json(const ModelConfig& c) {
  return json{{"resolution", c.resolution}, {"latent_dim", c.latent_dim}, {"channels", c.channels},
              {"kernel_size", c.kernel_size}, {"stride", c.stride},       {"padding", c.padding},
              {"gamma", c.gamma},           {"lambda", c.lambda},         {"alpha_min", c.alpha_min},
              {"alpha_max", c.alpha_max}};
}

json to_json(const TrainingConfig& c) {
  return json{{"batch_size", c.batch_size},
              {"phase1_epochs", c.phase1_epochs},
              {"phase2_epochs", c.phase2_epochs},
              {"phase1_learning_rate", c.phase1_learning_rate},
              {"ae_learning_rate", c.ae_learning_rate},
              {"critic_learning_rate", c.critic_learning_rate},
              {"iou_every", c.iou_every}};
}

ModelConfig model_config_from_json(const json& j) {
  reject_unknown(j,
                 {"resolution", "latent_dim", "channels", "kernel_size", "stride", "padding", "gamma", "lambda",
                  "alpha_min", "alpha_max"},
                 "model");
  ModelConfig c;
  read(j, "resolution", c.resolution);
  read(j, "latent_dim", c.latent_dim);
  read(j, "channels", c.channels);
  read(j, "kernel_size", c.kernel_size);
  read(j, "stride", c.stride);
  read(j, "padding", c.padding);
  read(j, "gamma", c.gamma);
  read(j, "lambda", c.lambda);
  read(j, "alpha_min", c.alpha_min);
  read(j, "alpha_max", c.alpha_max);
  c.validate();
  return c;
}

TrainingConfig training_config_from_json(const json& j) {
  reject_unknown(j,
                 {"batch_size", "phase1_epochs", "phase2_epochs", "phase1_learning_rate", "ae_learning_rate",
                  "critic_learning_rate", "iou_every"},
                 "training");
  TrainingConfig c;
  read(j, "batch_size", c.batch_size);
  read(j, "phase1_epochs", c.phase1_epochs);
  read(j, "phase2_epochs", c.phase2_epochs);
  read(j, "phase1_learning_rate", c.phase1_learning_rate);
  read(j, "ae_learning_rate", c.ae_learning_rate);
  read(j, "critic_learning_rate", c.critic_learning_rate);
  read(j, "iou_every", c.iou_every);
  c.validate();
  return c;
}

json to_json(const ModelSidecar& s) {
  return json{{"model", to_json(s.model)}, {"training", to_json(s.training)}, {"seed", s.seed}, {"stage", s.stage}};
}

ModelSidecar sidecar_from_json(const json& j) {
  reject_unknown(j, {"model", "training", "seed", "stage"}, "sidecar");
  ModelSidecar s;
  if (j.contains("model")) s.model = model_config_from_json(j.at("model"));
  if (j.contains("training")) s.training = training_config_from_json(j.at("training"));
  read(j, "seed", s.seed);
  read(j, "stage", s.stage);
  return s;
}

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint) {
  auto p = checkpoint;
  p += ".json";
  return p;
}

void save_sidecar(const ModelSidecar& s, const std::filesystem::path& checkpoint) {
  std::ofstream out(sidecar_path(checkpoint), std::ios::binary);
  if (!out) throw DataError("cannot write " + sidecar_path(checkpoint).string());
  out << to_json(s).dump(2) << '\n';
}

ModelSidecar load_sidecar(const std::filesystem::path& checkpoint) {
  const auto path = sidecar_path(checkpoint);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing checkpoint sidecar " + path.string());
  try {
    return sidecar_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace graspforge::model
