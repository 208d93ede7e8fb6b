#include "graspforge/model/trainer.hpp"

#include <numeric>
#include <string>

#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"
#include "graspforge/model/ae_critic.hpp"
#include "graspforge/model/losses.hpp"

namespace graspforge::model {

using engine::BatchNormMode;
using engine::Graph;
using engine::ParameterSet;
using engine::Tensor;
using engine::Var;

namespace {

bool autoencoder_filter(std::string_view id) { return is_autoencoder_parameter(id); }
bool critic_filter(std::string_view id) { return is_critic_parameter(id); }

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start + batch <= n; start += batch)
    batches.emplace_back(order.begin() + static_cast<long>(start), order.begin() + static_cast<long>(start + batch));
  return batches;
}

Tensor batch_tensor(const std::vector<geometry::VoxelGrid>& corpus, const std::vector<std::size_t>& idx,
                    std::uint32_t resolution) {
  std::vector<const geometry::VoxelGrid*> grids;
  for (auto i : idx) grids.push_back(&corpus[i]);
  return grids_to_tensor(grids, resolution);
}

bool measure_now(const TrainingConfig& t, int epoch, int epochs) {
  return epoch == epochs || (t.iou_every > 0 && epoch % t.iou_every == 0);
}

}  // namespace

double mean_reconstruction_iou(const ModelConfig& model, const ParameterSet& params,
                               const std::vector<geometry::VoxelGrid>& corpus) {
  if (corpus.empty()) throw DataError("IoU of an empty corpus");
  const auto latents = encode_all(model, params, corpus);
  const auto recon = decode_all(model, params, latents);
  double total = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) total += geometry::voxel_iou(recon[i], corpus[i]);
  return total / static_cast<double>(corpus.size());
}

TrainResult train(const std::vector<geometry::VoxelGrid>& corpus, const ModelConfig& model,
                  const TrainingConfig& training, std::uint64_t seed, const std::optional<ParameterSet>& initial,
                  const EpochCallback& on_epoch) {
  model.validate();
  training.validate();
  if (corpus.size() < training.batch_size)
    throw DataError("corpus of " + std::to_string(corpus.size()) + " shapes is smaller than the batch size " +
                    std::to_string(training.batch_size));
  for (const auto& g : corpus)
    if (g.resolution() != model.resolution)
      throw DimensionError("corpus grid resolution " + std::to_string(g.resolution()) +
                           " does not match model resolution " + std::to_string(model.resolution));

  TrainResult result;
  result.params = initial ? *initial : initialize_parameters(model, seed);
  check_parameters(model, result.params);
  ParameterSet& params = result.params;
  TrainingReport& report = result.report;
  report.seed = seed;
  report.model = model;
  report.training = training;

  auto finish_epoch = [&](EpochRecord rec, int epochs) {
    if (measure_now(training, rec.epoch, epochs)) rec.iou = mean_reconstruction_iou(model, params, corpus);
    report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    return rec;
  };

  // Phase 1: autoencoder alone.
  {
    Rng rng(derive_seed(seed, "phase1"));
    auto state = engine::OptimizerState::for_parameters(params, trainable_ids(params, false),
                                                        {training.phase1_learning_rate, 0.9, 0.999, 1e-8});
    for (int epoch = 1; epoch <= training.phase1_epochs; ++epoch) {
      EpochRecord rec;
      rec.phase = 1;
      rec.epoch = epoch;
      const auto batches = epoch_batches(corpus.size(), training.batch_size, rng);
      for (const auto& idx : batches) {
        const Tensor x = batch_tensor(corpus, idx, model.resolution);
        Graph g;
        std::vector<BatchStatsUpdate> updates;
        NetworkBuilder net(model, params, g, BatchNormMode::kTrain, &updates);
        Var loss = engine::bce(g, net.decode(net.encode(g.constant(x))), x);
        g.backward(loss, autoencoder_filter);
        engine::adam_step(params, g.parameter_grads(), state);
        apply_batch_stats(params, updates);
        rec.ae_loss += g.value(loss).item();
      }
      rec.ae_loss /= static_cast<double>(batches.size());
      rec.reconstruction_loss = rec.ae_loss;
      rec = finish_epoch(rec, training.phase1_epochs);
      if (epoch == training.phase1_epochs) report.phase1_iou = rec.iou;
    }
  }

  // Phase 2: alternating critic and autoencoder updates.
  {
    Rng rng(derive_seed(seed, "phase2"));
    auto ae_state = engine::OptimizerState::for_parameters(params, trainable_ids(params, false),
                                                           {training.ae_learning_rate, 0.9, 0.999, 1e-8});
    auto critic_state = engine::OptimizerState::for_parameters(params, trainable_ids(params, true),
                                                               {training.critic_learning_rate, 0.9, 0.999, 1e-8});
    const std::size_t n = training.batch_size;
    for (int epoch = 1; epoch <= training.phase2_epochs; ++epoch) {
      EpochRecord rec;
      rec.phase = 2;
      rec.epoch = epoch;
      double critic_total = 0.0;
      const auto batches = epoch_batches(corpus.size(), n, rng);
      for (const auto& idx : batches) {
        const Tensor x = batch_tensor(corpus, idx, model.resolution);
        // Each item is mixed with a distinct partner from the same batch.
        const std::size_t shift = 1 + rng.below(n - 1);
        std::vector<std::size_t> partner(n);
        std::vector<double> alpha(n);
        for (std::size_t i = 0; i < n; ++i) {
          partner[i] = (i + shift) % n;
          alpha[i] = rng.uniform(model.alpha_min, model.alpha_max);
        }
        Graph g;
        std::vector<BatchStatsUpdate> updates;
        NetworkBuilder net(model, params, g, BatchNormMode::kTrain, &updates);
        const AdversarialLosses losses = adversarial_losses(net, g, x, partner, alpha, model.gamma, model.lambda);
        g.backward(losses.critic_loss, critic_filter);
        const auto critic_grads = g.parameter_grads();
        g.backward(losses.ae_loss, autoencoder_filter);
        const auto ae_grads = g.parameter_grads();
        engine::adam_step(params, critic_grads, critic_state);
        engine::adam_step(params, ae_grads, ae_state);
        apply_batch_stats(params, updates);

        critic_total += g.value(losses.critic_loss).item();
        rec.ae_loss += g.value(losses.ae_loss).item();
        rec.reconstruction_loss += engine::bce_loss(g.value(losses.reconstruction), x);
      }
      const auto count = static_cast<double>(batches.size());
      rec.ae_loss /= count;
      rec.reconstruction_loss /= count;
      rec.critic_loss = critic_total / count;
      finish_epoch(rec, training.phase2_epochs);
    }
  }

  report.final_iou = report.epochs.empty() || !report.epochs.back().iou
                         ? mean_reconstruction_iou(model, params, corpus)
                         : *report.epochs.back().iou;
  return result;
}

nlohmann::json to_json(const TrainingReport& report) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : report.epochs) {
    nlohmann::json j{{"phase", e.phase},
                     {"epoch", e.epoch},
                     {"ae_loss", e.ae_loss},
                     {"reconstruction_loss", e.reconstruction_loss},
                     {"critic_loss", nullptr},
                     {"iou", nullptr}};
    if (e.critic_loss) j["critic_loss"] = *e.critic_loss;
    if (e.iou) j["iou"] = *e.iou;
    epochs.push_back(std::move(j));
  }
  nlohmann::json out{{"seed", report.seed},
                     {"model", to_json(report.model)},
                     {"training", to_json(report.training)},
                     {"epochs", std::move(epochs)},
                     {"phase1_iou", nullptr},
                     {"final_iou", report.final_iou}};
  if (report.phase1_iou) out["phase1_iou"] = *report.phase1_iou;
  return out;
}

}  // namespace graspforge::model
