#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"
#include "graspforge/engine/checkpoint.hpp"
#include "graspforge/engine/kernels.hpp"
#include "graspforge/model/ae_critic.hpp"
#include "graspforge/model/config.hpp"
#include "graspforge/model/losses.hpp"
#include "graspforge/model/trainer.hpp"
#include "support/finite_difference.hpp"

using namespace graspforge;
using namespace graspforge::model;
using engine::BatchNormMode;
using engine::Graph;
using engine::ParameterSet;
using engine::Shape;
using engine::Tensor;
using geometry::Vec3;
using geometry::VoxelGrid;
using graspforge::testing::central_difference;
using graspforge::testing::relative_error;

namespace {

ModelConfig tiny_config() {
  ModelConfig c;
  c.resolution = 8;
  c.latent_dim = 4;
  c.channels = {2, 3};
  return c;
}

VoxelGrid random_grid(std::uint32_t r, Rng& rng, double density = 0.4) {
  VoxelGrid g(r, Vec3::Zero(), 1.0 / r);
  for (double& v : g.values()) v = rng.uniform() < density ? 1.0 : 0.0;
  return g;
}

// Axis-aligned box occupying [lo, hi) in every axis.
VoxelGrid box_grid(std::uint32_t r, std::uint32_t lo, std::uint32_t hi) {
  VoxelGrid g(r, Vec3::Zero(), 1.0 / r);
  for (std::uint32_t z = lo; z < hi; ++z)
    for (std::uint32_t y = lo; y < hi; ++y)
      for (std::uint32_t x = lo; x < hi; ++x) g.set(x, y, z, 1.0);
  return g;
}

std::vector<VoxelGrid> tiny_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<VoxelGrid> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_grid(8, rng, rng.uniform(0.2, 0.6)));
  return out;
}

struct FdStats {
  std::size_t checked = 0;
  double worst = 0.0;
};

// Compares one analytic gradient map against central differences of `loss`
// on `samples` random (parameter, index) coordinates.
FdStats fd_check(ParameterSet& params, const std::map<std::string, Tensor>& grads,
                 const std::function<double()>& loss, std::size_t samples, Rng& rng) {
  std::vector<std::string> ids;
  for (const auto& [id, g] : grads) ids.push_back(id);
  FdStats stats;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::string& id = ids[rng.below(ids.size())];
    const std::size_t i = rng.below(params.at(id).size());
    const double numeric = central_difference(params.mutable_at(id)[i], loss);
    const double err = relative_error(grads.at(id)[i], numeric);
    if (err >= 1e-4) MESSAGE(id << "[" << i << "] analytic " << grads.at(id)[i] << " numeric " << numeric);
    stats.worst = std::max(stats.worst, err);
    ++stats.checked;
  }
  return stats;
}

}  // namespace

TEST_CASE("model config validation and JSON round trip") {
  ModelConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.bottleneck_extent() == 2);
  ModelConfig bad = c;
  bad.resolution = 24;  // not divisible by 2^4
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.alpha_max = 0.7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.gamma = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.kernel_size = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  CHECK(model_config_from_json(to_json(tiny_config())) == tiny_config());
  TrainingConfig t;
  CHECK(t.phase1_learning_rate == 1e-3);
  CHECK(t.ae_learning_rate == 1e-4);
  CHECK(t.critic_learning_rate == 1e-3);
  CHECK(training_config_from_json(to_json(t)) == t);
  CHECK_THROWS_AS(model_config_from_json(nlohmann::json{{"resolutoin", 32}}), ConfigError);
  CHECK_THROWS_AS(model_config_from_json(nlohmann::json{{"resolution", "big"}}), ConfigError);
}

TEST_CASE("paper-scale architecture is expressible") {
  ModelConfig c;
  c.resolution = 64;
  c.latent_dim = 128;
  c.channels = {32, 64, 128, 256, 512};
  CHECK_NOTHROW(c.validate());
  CHECK(c.bottleneck_extent() == 2);
}

TEST_CASE("encode and decode contracts") {
  const ModelConfig c = tiny_config();
  const ParameterSet p = initialize_parameters(c, 1);
  CHECK_NOTHROW(check_parameters(c, p));
  Rng rng(3);
  const VoxelGrid x = random_grid(8, rng);
  const LatentVector z = encode(c, p, x);
  CHECK(z.size() == c.latent_dim);
  CHECK(encode(c, p, x) == z);
  for (double v : z) CHECK(std::isfinite(v));

  const VoxelGrid y = decode(c, p, z);
  CHECK(y.resolution() == 8);
  for (double v : y.values()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  CHECK(decode(c, p, z) == y);

  // Batched and single inference agree bit for bit.
  const std::vector<VoxelGrid> batch = {x, random_grid(8, rng), random_grid(8, rng)};
  const auto zs = encode_all(c, p, batch);
  CHECK(zs[0] == z);
  CHECK(encode(c, p, batch[2]) == zs[2]);

  CHECK_THROWS_AS(encode(c, p, random_grid(16, rng)), DimensionError);
  CHECK_THROWS_AS(decode(c, p, LatentVector(3, 0.0)), DimensionError);
  CHECK_THROWS_AS(critic_score(c, p, random_grid(16, rng)), DimensionError);
  const double s = critic_score(c, p, x);
  CHECK(std::isfinite(s));
  CHECK(critic_score(c, p, x) == s);
}

TEST_CASE("paper-scale encoder emits a 128-dimensional latent") {
  ModelConfig c;
  c.resolution = 64;
  c.latent_dim = 128;
  c.channels = {4, 4, 4, 4, 4};
  const ParameterSet p = initialize_parameters(c, 2);
  Rng rng(1);
  CHECK(encode(c, p, random_grid(64, rng)).size() == 128);
}

TEST_CASE("checkpoint config mismatch is detected") {
  const ParameterSet p = initialize_parameters(tiny_config(), 1);
  ModelConfig other = tiny_config();
  other.latent_dim = 5;
  CHECK_THROWS_AS(check_parameters(other, p), ConfigError);
}

TEST_CASE("interpolation formula, endpoints and symmetry") {
  const LatentVector z1 = {1.0, 0.0}, z2 = {0.0, 1.0};
  CHECK(interpolate(z1, z2, 0.25) == LatentVector{0.25, 0.75});
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    LatentVector a(6), b(6);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    CHECK(interpolate(a, b, 1.0) == a);
    CHECK(interpolate(a, b, 0.0) == b);
    const double alpha = rng.uniform();
    CHECK(interpolate(a, b, alpha) == interpolate(b, a, 1.0 - alpha));
    const auto p = interpolate(a, b, alpha), q = interpolate(a, b, 1.0 - alpha);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(p[i] + q[i] - (a[i] + b[i])) < 1e-12);
  }
  CHECK_THROWS_AS(interpolate({1.0}, {1.0, 2.0}, 0.5), DimensionError);
}

TEST_CASE("loss closed forms") {
  CHECK(critic_loss_value(std::vector<double>{0.5}, std::vector<double>{0.3}, std::vector<double>{0.1}) ==
        doctest::Approx(0.05).epsilon(1e-12));
  CHECK(critic_loss_value(std::vector<double>{0.2, 0.4}, std::vector<double>{0.2, 0.4},
                          std::vector<double>{0.0, 0.0}) == 0.0);
  CHECK(ae_loss_value(0.4, 0.5, std::vector<double>{0.2}) == doctest::Approx(0.42).epsilon(1e-12));
  CHECK(ae_loss_value(0.4, 0.0, std::vector<double>{0.9, -3.0}) == 0.4);
  CHECK_THROWS_AS(critic_loss_value(std::vector<double>{0.5}, std::vector<double>{1.3}, std::vector<double>{0.1}),
                  DataError);
}

TEST_CASE("graph losses match elementwise oracles") {
  const ModelConfig c = tiny_config();
  const ParameterSet p = initialize_parameters(c, 5);
  const auto corpus = tiny_corpus(4, 11);
  std::vector<const VoxelGrid*> ptrs;
  for (const auto& g : corpus) ptrs.push_back(&g);
  const Tensor x = grids_to_tensor(ptrs, 8);
  const std::vector<std::size_t> partner = {1, 2, 3, 0};
  const std::vector<double> alpha = {0.1, 0.25, 0.4, 0.05};

  Graph g;
  NetworkBuilder net(c, p, g, BatchNormMode::kTrain);
  const auto losses = adversarial_losses(net, g, x, partner, alpha, c.gamma, c.lambda);

  // Recompute every piece through separate graphs and combine by hand.
  Graph g2;
  NetworkBuilder net2(c, p, g2, BatchNormMode::kTrain);
  auto z = net2.encode(g2.constant(x));
  const Tensor zt = g2.value(z);
  const Tensor x_hat = g2.value(net2.decode(z));
  Tensor z_mix(zt.shape());
  const std::size_t d = c.latent_dim;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < d; ++k)
      z_mix[i * d + k] = alpha[i] * zt[i * d + k] + (1.0 - alpha[i]) * zt[partner[i] * d + k];
  const Tensor x_hat_alpha = g2.value(net2.decode(g2.constant(z_mix)));
  Tensor mixture(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) mixture[i] = c.gamma * x[i] + (1.0 - c.gamma) * x_hat[i];
  const Tensor c_alpha = g2.value(net2.critic(g2.constant(x_hat_alpha)));
  const Tensor c_mix = g2.value(net2.critic(g2.constant(mixture)));

  double lc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) lc += (c_alpha[i] - alpha[i]) * (c_alpha[i] - alpha[i]) / 4.0;
  for (std::size_t i = 0; i < 4; ++i) lc += c_mix[i] * c_mix[i] / 4.0;
  double bce = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double q = std::clamp(x_hat[i], engine::kBceClamp, 1.0 - engine::kBceClamp);
    bce -= x[i] * std::log(q) + (1.0 - x[i]) * std::log(1.0 - q);
  }
  bce /= static_cast<double>(x.size());
  double penalty = 0.0;
  for (std::size_t i = 0; i < 4; ++i) penalty += c_alpha[i] * c_alpha[i] / 4.0;

  CHECK(std::abs(g.value(losses.critic_loss).item() - lc) < 1e-12);
  CHECK(std::abs(g.value(losses.ae_loss).item() - (bce + c.lambda * penalty)) < 1e-12);
  CHECK_THROWS_AS(adversarial_losses(net, g, x, partner, {0.1, 0.2, 1.5, 0.0}, c.gamma, c.lambda), DataError);
}

TEST_CASE("critic and autoencoder loss gradients match finite differences") {
  const ModelConfig c = tiny_config();
  ParameterSet p = initialize_parameters(c, 21);
  const auto corpus = tiny_corpus(4, 31);
  std::vector<const VoxelGrid*> ptrs;
  for (const auto& g : corpus) ptrs.push_back(&g);
  const Tensor x = grids_to_tensor(ptrs, 8);
  const std::vector<std::size_t> partner = {2, 3, 0, 1};
  const std::vector<double> alpha = {0.3, 0.1, 0.45, 0.2};
  Rng rng(77);

  for (bool critic : {true, false}) {
    Graph g;
    NetworkBuilder net(c, p, g, BatchNormMode::kTrain);
    const auto losses = adversarial_losses(net, g, x, partner, alpha, c.gamma, c.lambda);
    const engine::Var target = critic ? losses.critic_loss : losses.ae_loss;
    g.backward(target);
    auto grads = g.parameter_grads();
    std::erase_if(grads, [](const auto& kv) { return is_running_statistic(kv.first); });
    auto loss = [&] {
      Graph h;
      NetworkBuilder n2(c, p, h, BatchNormMode::kTrain);
      const auto l = adversarial_losses(n2, h, x, partner, alpha, c.gamma, c.lambda);
      return h.value(critic ? l.critic_loss : l.ae_loss).item();
    };
    const FdStats stats = fd_check(p, grads, loss, 200, rng);
    CHECK(stats.checked >= 200);
    CHECK(stats.worst < 1e-4);
  }
}

TEST_CASE("filtered backward gives each network only its own gradients") {
  const ModelConfig c = tiny_config();
  const ParameterSet p = initialize_parameters(c, 2);
  const auto corpus = tiny_corpus(2, 1);
  const Tensor x = grids_to_tensor({&corpus[0], &corpus[1]}, 8);
  Graph g;
  NetworkBuilder net(c, p, g, BatchNormMode::kTrain);
  const auto losses = adversarial_losses(net, g, x, {1, 0}, {0.2, 0.4}, c.gamma, c.lambda);
  g.backward(losses.critic_loss, [](std::string_view id) { return is_critic_parameter(id); });
  for (const auto& [id, t] : g.parameter_grads()) CHECK(is_critic_parameter(id));
  g.backward(losses.ae_loss, [](std::string_view id) { return is_autoencoder_parameter(id); });
  for (const auto& [id, t] : g.parameter_grads()) CHECK(is_autoencoder_parameter(id));
}

TEST_CASE("a small autoencoder gradient step with lambda 0 lowers BCE") {
  const ModelConfig c = tiny_config();
  ParameterSet p = initialize_parameters(c, 4);
  const auto corpus = tiny_corpus(4, 8);
  std::vector<const VoxelGrid*> ptrs;
  for (const auto& g : corpus) ptrs.push_back(&g);
  const Tensor x = grids_to_tensor(ptrs, 8);
  auto evaluate = [&](std::map<std::string, Tensor>* grads) {
    Graph g;
    NetworkBuilder net(c, p, g, BatchNormMode::kTrain);
    const auto l = adversarial_losses(net, g, x, {1, 2, 3, 0}, {0.1, 0.2, 0.3, 0.4}, c.gamma, 0.0);
    if (grads) {
      g.backward(l.ae_loss, [](std::string_view id) { return is_autoencoder_parameter(id); });
      *grads = g.parameter_grads();
    }
    return g.value(l.ae_loss).item();
  };
  std::map<std::string, Tensor> grads;
  const double before = evaluate(&grads);
  for (const auto& [id, gr] : grads)
    for (std::size_t i = 0; i < gr.size(); ++i) p.mutable_at(id)[i] -= 1e-5 * gr[i];
  CHECK(evaluate(nullptr) < before);
}

TEST_CASE("running statistics follow the momentum rule") {
  ParameterSet p;
  p.insert("l.running_mean", Tensor(Shape{2}, std::vector<double>{0.0, 1.0}));
  p.insert("l.running_var", Tensor(Shape{2}, std::vector<double>{1.0, 2.0}));
  engine::BatchStats s{Tensor(Shape{2}, std::vector<double>{2.0, -1.0}), Tensor(Shape{2}, std::vector<double>{0.5, 4.0}), 5};
  apply_batch_stats(p, {{"l", s}});
  CHECK(p.at("l.running_mean")[0] == doctest::Approx(0.2));
  CHECK(p.at("l.running_mean")[1] == doctest::Approx(0.9 - 0.1));
  CHECK(p.at("l.running_var")[0] == doctest::Approx(0.9 + 0.1 * 0.5 * 1.25));
  CHECK(p.at("l.running_var")[1] == doctest::Approx(1.8 + 0.1 * 4.0 * 1.25));
}

TEST_CASE("training with zero epochs returns the initialization") {
  const ModelConfig c = tiny_config();
  TrainingConfig t;
  t.batch_size = 4;
  t.phase1_epochs = 0;
  t.phase2_epochs = 0;
  const auto result = train(tiny_corpus(8, 2), c, t, 42);
  CHECK(result.params == initialize_parameters(c, 42));
  CHECK(result.report.epochs.empty());
}

TEST_CASE("training is reproducible and splits cleanly into phases") {
  const ModelConfig c = tiny_config();
  const auto corpus = tiny_corpus(10, 6);
  TrainingConfig t;
  t.batch_size = 4;
  t.phase1_epochs = 2;
  t.phase2_epochs = 2;
  const auto a = train(corpus, c, t, 7);
  const auto b = train(corpus, c, t, 7);
  CHECK(engine::serialize_checkpoint(a.params) == engine::serialize_checkpoint(b.params));
  CHECK(to_json(a.report) == to_json(b.report));
  REQUIRE(a.report.epochs.size() == 4);
  for (const auto& e : a.report.epochs) {
    CHECK(std::isfinite(e.ae_loss));
    CHECK(e.ae_loss >= 0.0);
    CHECK(e.iou.has_value());
    CHECK(e.critic_loss.has_value() == (e.phase == 2));
    if (e.critic_loss) CHECK(*e.critic_loss >= 0.0);
  }

  TrainingConfig p1 = t;
  p1.phase2_epochs = 0;
  const auto first = train(corpus, c, p1, 7);
  TrainingConfig p2 = t;
  p2.phase1_epochs = 0;
  const auto second = train(corpus, c, p2, 7, first.params);
  CHECK(second.params == a.params);

  const auto other = train(corpus, c, t, 8);
  CHECK_FALSE(other.params == a.params);
}

TEST_CASE("training rejects a corpus smaller than a batch") {
  TrainingConfig t;
  t.batch_size = 16;
  CHECK_THROWS_AS(train(tiny_corpus(5, 1), tiny_config(), t, 1), DataError);
}

TEST_CASE("phase 1 learns to reconstruct a small corpus") {
  ModelConfig c = tiny_config();
  c.channels = {4, 8};
  c.latent_dim = 8;
  std::vector<VoxelGrid> corpus;
  for (std::uint32_t lo = 0; lo < 3; ++lo)
    for (std::uint32_t hi = 5; hi < 9; ++hi) corpus.push_back(box_grid(8, lo, hi));
  TrainingConfig t;
  t.batch_size = 4;
  t.phase1_epochs = 60;
  t.phase2_epochs = 0;
  t.iou_every = 0;
  const auto result = train(corpus, c, t, 3);
  CHECK(result.report.epochs.front().ae_loss > result.report.epochs.back().ae_loss);
  CHECK(result.report.final_iou > 0.7);
}
