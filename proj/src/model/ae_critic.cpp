#include "graspforge/model/ae_critic.hpp"

#include <algorithm>
#include <cmath>

#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"

namespace graspforge::model {

using engine::BatchNormMode;
using engine::Graph;
using engine::ParameterSet;
using engine::Shape;
using engine::Tensor;
using engine::Var;

namespace {

// One item per forward pass: GEMM blocking depends on the batch width, so
// batching would make a latent depend on which shapes share its batch.
constexpr std::size_t kInferenceChunk = 1;

struct ParamSpec {
  std::string id;
  Shape shape;
  enum Kind { kWeight, kZero, kOne } kind;
  std::size_t fan_in = 0, fan_out = 0;
};

std::vector<ParamSpec> parameter_specs(const ModelConfig& c) {
  std::vector<ParamSpec> specs;
  const std::size_t k = c.kernel_size, k3 = k * k * k;
  const std::size_t layers = c.channels.size();
  const std::size_t b = c.bottleneck_extent();
  const std::size_t flat = c.channels.back() * b * b * b;

  auto bn = [&](const std::string& layer, std::size_t ch) {
    specs.push_back({layer + ".scale", {ch}, ParamSpec::kOne});
    specs.push_back({layer + ".shift", {ch}, ParamSpec::kZero});
    specs.push_back({layer + ".running_mean", {ch}, ParamSpec::kZero});
    specs.push_back({layer + ".running_var", {ch}, ParamSpec::kOne});
  };
  auto linear = [&](const std::string& layer, std::size_t in, std::size_t out) {
    specs.push_back({layer + ".w", {out, in}, ParamSpec::kWeight, in, out});
    specs.push_back({layer + ".b", {out}, ParamSpec::kZero});
  };
  auto encoder = [&](const std::string& prefix) {
    std::size_t in = 1;
    for (std::size_t i = 0; i < layers; ++i) {
      const std::size_t out = c.channels[i];
      const std::string layer = prefix + ".conv" + std::to_string(i);
      specs.push_back({layer + ".w", {out, in, k, k, k}, ParamSpec::kWeight, in * k3, out * k3});
      bn(prefix + ".bn" + std::to_string(i), out);
      in = out;
    }
  };

  encoder("enc");
  linear("enc.fc", flat, c.latent_dim);

  linear("dec.fc", c.latent_dim, flat);
  for (std::size_t i = layers; i-- > 0;) {
    const std::size_t in = c.channels[i];
    const std::size_t out = i == 0 ? 1 : c.channels[i - 1];
    const std::string layer = "dec.deconv" + std::to_string(i);
    specs.push_back({layer + ".w", {in, out, k, k, k}, ParamSpec::kWeight, in * k3, out * k3});
    if (i > 0)
      bn("dec.bn" + std::to_string(i), out);
    else
      specs.push_back({layer + ".b", {out}, ParamSpec::kZero});
  }

  encoder("critic");
  linear("critic.fc0", flat, c.latent_dim);
  linear("critic.fc1", c.latent_dim, 1);
  return specs;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

ParameterSet initialize_parameters(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, "init"));
  ParameterSet params;
  for (const auto& spec : parameter_specs(config)) {
    Tensor t(spec.shape);
    switch (spec.kind) {
      case ParamSpec::kZero:
        break;
      case ParamSpec::kOne:
        t.fill(1.0);
        break;
      case ParamSpec::kWeight: {
        const double limit = std::sqrt(6.0 / static_cast<double>(spec.fan_in + spec.fan_out));
        for (double& v : t.data()) v = rng.uniform(-limit, limit);
        break;
      }
    }
    params.insert(spec.id, std::move(t));
  }
  return params;
}

void check_parameters(const ModelConfig& config, const ParameterSet& params) {
  const auto specs = parameter_specs(config);
  for (const auto& spec : specs) {
    if (!params.contains(spec.id)) throw ConfigError("checkpoint lacks parameter " + spec.id);
    if (params.at(spec.id).shape() != spec.shape)
      throw ConfigError("checkpoint parameter " + spec.id + " has shape " +
                        engine::shape_string(params.at(spec.id).shape()) + ", config expects " +
                        engine::shape_string(spec.shape));
  }
  if (params.size() != specs.size())
    throw ConfigError("checkpoint has " + std::to_string(params.size()) + " tensors, config expects " +
                      std::to_string(specs.size()));
}

bool is_critic_parameter(std::string_view id) { return id.starts_with("critic.") && !is_running_statistic(id); }

bool is_autoencoder_parameter(std::string_view id) {
  return (id.starts_with("enc.") || id.starts_with("dec.")) && !is_running_statistic(id);
}

bool is_running_statistic(std::string_view id) {
  return ends_with(id, ".running_mean") || ends_with(id, ".running_var");
}

std::vector<std::string> trainable_ids(const ParameterSet& params, bool critic) {
  std::vector<std::string> ids;
  for (const auto& [id, t] : params.tensors())
    if (critic ? is_critic_parameter(id) : is_autoencoder_parameter(id)) ids.push_back(id);
  return ids;
}

NetworkBuilder::NetworkBuilder(const ModelConfig& config, const ParameterSet& params, Graph& graph,
                               BatchNormMode mode, std::vector<BatchStatsUpdate>* updates)
    : config_(config), params_(params), g_(graph), mode_(mode), updates_(updates) {}

Var NetworkBuilder::param(const std::string& id) { return g_.parameter(id, params_.at(id)); }

Var NetworkBuilder::no_bias(std::size_t channels) { return g_.constant(Tensor(Shape{channels})); }

Var NetworkBuilder::bn(Var x, const std::string& layer) {
  engine::BatchStats stats;
  const bool record = mode_ == BatchNormMode::kTrain && updates_ != nullptr;
  Var y = engine::batch_norm(g_, x, param(layer + ".scale"), param(layer + ".shift"), mode_,
                             params_.at(layer + ".running_mean"), params_.at(layer + ".running_var"),
                             record ? &stats : nullptr);
  if (record) updates_->push_back({layer, std::move(stats)});
  return y;
}

Var NetworkBuilder::conv_stack(Var x, const std::string& prefix) {
  const engine::ConvGeometry geom{config_.stride, config_.padding};
  for (std::size_t i = 0; i < config_.channels.size(); ++i) {
    const std::string layer = prefix + ".conv" + std::to_string(i);
    x = engine::conv3d(g_, x, param(layer + ".w"), no_bias(config_.channels[i]), geom);
    x = engine::relu(g_, bn(x, prefix + ".bn" + std::to_string(i)));
  }
  const std::size_t n = g_.value(x).dim(0);
  return engine::reshape(g_, x, Shape{n, g_.value(x).size() / n});
}

Var NetworkBuilder::encode(Var voxels) {
  Var h = conv_stack(voxels, "enc");
  return engine::linear(g_, h, param("enc.fc.w"), param("enc.fc.b"));
}

Var NetworkBuilder::decode(Var latents) {
  const engine::ConvGeometry geom{config_.stride, config_.padding};
  const std::size_t n = g_.value(latents).dim(0);
  const std::size_t b = config_.bottleneck_extent();
  Var h = engine::relu(g_, engine::linear(g_, latents, param("dec.fc.w"), param("dec.fc.b")));
  h = engine::reshape(g_, h, Shape{n, config_.channels.back(), b, b, b});
  for (std::size_t i = config_.channels.size(); i-- > 0;) {
    const std::string layer = "dec.deconv" + std::to_string(i);
    const bool last = i == 0;
    Var bias = last ? param(layer + ".b") : no_bias(config_.channels[i - 1]);
    h = engine::conv3d_transposed(g_, h, param(layer + ".w"), bias, geom);
    if (i > 0) h = engine::relu(g_, bn(h, "dec.bn" + std::to_string(i)));
  }
  return engine::sigmoid(g_, h);
}

Var NetworkBuilder::critic(Var voxels) {
  Var h = conv_stack(voxels, "critic");
  h = engine::relu(g_, engine::linear(g_, h, param("critic.fc0.w"), param("critic.fc0.b")));
  return engine::linear(g_, h, param("critic.fc1.w"), param("critic.fc1.b"));
}

void apply_batch_stats(ParameterSet& params, const std::vector<BatchStatsUpdate>& updates,
                       const engine::BatchNormParams& bn) {
  for (const auto& u : updates) {
    Tensor& mean = params.mutable_at(u.layer + ".running_mean");
    Tensor& var = params.mutable_at(u.layer + ".running_var");
    const double unbias =
        u.stats.count > 1 ? static_cast<double>(u.stats.count) / static_cast<double>(u.stats.count - 1) : 1.0;
    for (std::size_t c = 0; c < mean.size(); ++c) {
      mean[c] = (1.0 - bn.momentum) * mean[c] + bn.momentum * u.stats.mean[c];
      var[c] = (1.0 - bn.momentum) * var[c] + bn.momentum * u.stats.var[c] * unbias;
    }
  }
}

Tensor grids_to_tensor(const std::vector<const geometry::VoxelGrid*>& grids, std::uint32_t resolution) {
  const std::size_t r = resolution, cells = r * r * r;
  Tensor t(Shape{grids.size(), 1, r, r, r});
  for (std::size_t i = 0; i < grids.size(); ++i) {
    if (grids[i]->resolution() != resolution)
      throw DimensionError("grid resolution " + std::to_string(grids[i]->resolution()) +
                           " does not match model resolution " + std::to_string(resolution));
    std::copy(grids[i]->values().begin(), grids[i]->values().end(), t.raw() + i * cells);
  }
  return t;
}

std::vector<LatentVector> encode_all(const ModelConfig& config, const ParameterSet& params,
                                     const std::vector<geometry::VoxelGrid>& grids) {
  std::vector<LatentVector> out;
  out.reserve(grids.size());
  for (std::size_t start = 0; start < grids.size(); start += kInferenceChunk) {
    std::vector<const geometry::VoxelGrid*> chunk;
    for (std::size_t i = start; i < std::min(grids.size(), start + kInferenceChunk); ++i) chunk.push_back(&grids[i]);
    Graph g;
    NetworkBuilder net(config, params, g, BatchNormMode::kEval);
    const Tensor& z = g.value(net.encode(g.constant(grids_to_tensor(chunk, config.resolution))));
    const std::size_t d = config.latent_dim;
    for (std::size_t i = 0; i < chunk.size(); ++i) out.emplace_back(z.raw() + i * d, z.raw() + (i + 1) * d);
  }
  return out;
}

LatentVector encode(const ModelConfig& config, const ParameterSet& params, const geometry::VoxelGrid& grid) {
  return encode_all(config, params, {grid}).front();
}

std::vector<geometry::VoxelGrid> decode_all(const ModelConfig& config, const ParameterSet& params,
                                            const std::vector<LatentVector>& latents) {
  const std::size_t d = config.latent_dim, r = config.resolution, cells = r * r * r;
  std::vector<geometry::VoxelGrid> out;
  out.reserve(latents.size());
  for (std::size_t start = 0; start < latents.size(); start += kInferenceChunk) {
    const std::size_t count = std::min(latents.size(), start + kInferenceChunk) - start;
    Tensor z(Shape{count, d});
    for (std::size_t i = 0; i < count; ++i) {
      const auto& v = latents[start + i];
      if (v.size() != d)
        throw DimensionError("latent of length " + std::to_string(v.size()) + " for a " + std::to_string(d) +
                             "-dimensional model");
      std::copy(v.begin(), v.end(), z.raw() + i * d);
    }
    Graph g;
    NetworkBuilder net(config, params, g, BatchNormMode::kEval);
    const Tensor& x = g.value(net.decode(g.constant(std::move(z))));
    for (std::size_t i = 0; i < count; ++i)
      out.emplace_back(config.resolution, geometry::Vec3::Zero(), 1.0 / static_cast<double>(r),
                       std::vector<double>(x.raw() + i * cells, x.raw() + (i + 1) * cells));
  }
  return out;
}

geometry::VoxelGrid decode(const ModelConfig& config, const ParameterSet& params, const LatentVector& z) {
  return decode_all(config, params, {z}).front();
}

double critic_score(const ModelConfig& config, const ParameterSet& params, const geometry::VoxelGrid& grid) {
  Graph g;
  NetworkBuilder net(config, params, g, BatchNormMode::kEval);
  return g.value(net.critic(g.constant(grids_to_tensor({&grid}, config.resolution)))).item();
}

LatentVector interpolate(const LatentVector& z1, const LatentVector& z2, double alpha) {
  if (z1.size() != z2.size())
    throw DimensionError("cannot interpolate latents of lengths " + std::to_string(z1.size()) + " and " +
                         std::to_string(z2.size()));
  // For alpha >= 0.5, 1 - alpha is exact. Below that the weights are derived
  // from the rounded 1 - alpha, so swapping the arguments and passing
  // 1 - alpha reproduces the same pair of weights bit for bit.
  double w1 = alpha, w2 = 1.0 - alpha;
  if (alpha < 0.5) w1 = 1.0 - w2;
  LatentVector out(z1.size());
  for (std::size_t i = 0; i < z1.size(); ++i) out[i] = w1 * z1[i] + w2 * z2[i];
  return out;
}

}  // namespace graspforge::model
