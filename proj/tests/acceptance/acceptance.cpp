// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Usage: acceptance [criterion numbers...] [--phase1 CHECKPOINT]

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "graspforge/augment/generation.hpp"
#include "graspforge/augment/manifest.hpp"
#include "graspforge/core/digest.hpp"
#include "graspforge/core/rng.hpp"
#include "graspforge/engine/checkpoint.hpp"
#include "graspforge/geometry/marching_cubes.hpp"
#include "graspforge/geometry/primitives.hpp"
#include "graspforge/geometry/smoothing.hpp"
#include "graspforge/geometry/toy_shapes.hpp"
#include "graspforge/geometry/voxelize.hpp"
#include "graspforge/grasp/rarity.hpp"
#include "graspforge/grasp/wrench_space.hpp"
#include "graspforge/model/ae_critic.hpp"
#include "graspforge/model/losses.hpp"
#include "graspforge/model/trainer.hpp"
#include "graspforge/pipeline/config.hpp"
#include "support/finite_difference.hpp"
#include "support/oracles.hpp"

using namespace graspforge;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kFdTolerance = 1e-4;
constexpr std::size_t kFdCoordinates = 200;  // per loss
constexpr double kRarityTolerance = 1e-9;
constexpr double kDenseConeTolerance = 0.10;
constexpr double kGeometryTolerance = 0.05;
constexpr double kIouTarget = 0.7;
constexpr double kTrainingBudgetSeconds = 1800.0;
constexpr std::size_t kTrendPairs = 100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

Outcome gradients() {
  model::ModelConfig c;
  c.resolution = 8;
  c.latent_dim = 4;
  c.channels = {2, 3};
  engine::ParameterSet p = model::initialize_parameters(c, 21);
  Rng data(31);
  std::vector<geometry::VoxelGrid> grids;
  for (int i = 0; i < 4; ++i) {
    geometry::VoxelGrid g(8, geometry::Vec3::Zero(), 1.0 / 8);
    const double density = data.uniform(0.2, 0.6);
    for (double& v : g.values()) v = data.uniform() < density ? 1.0 : 0.0;
    grids.push_back(std::move(g));
  }
  std::vector<const geometry::VoxelGrid*> ptrs;
  for (const auto& g : grids) ptrs.push_back(&g);
  const engine::Tensor x = model::grids_to_tensor(ptrs, 8);
  const std::vector<std::size_t> partner = {2, 3, 0, 1};
  const std::vector<double> alpha = {0.3, 0.1, 0.45, 0.2};
  Rng rng(77);

  double worst[2] = {0, 0};
  std::size_t checked[2] = {0, 0};
  for (int which = 0; which < 2; ++which) {
    const bool critic = which == 0;
    engine::Graph g;
    model::NetworkBuilder net(c, p, g, engine::BatchNormMode::kTrain);
    const auto losses = model::adversarial_losses(net, g, x, partner, alpha, c.gamma, c.lambda);
    g.backward(critic ? losses.critic_loss : losses.ae_loss);
    auto grads = g.parameter_grads();
    std::erase_if(grads, [](const auto& kv) { return model::is_running_statistic(kv.first); });
    std::vector<std::string> ids;
    for (const auto& [id, t] : grads) ids.push_back(id);
    auto loss = [&] {
      engine::Graph h;
      model::NetworkBuilder n2(c, p, h, engine::BatchNormMode::kTrain);
      const auto l = model::adversarial_losses(n2, h, x, partner, alpha, c.gamma, c.lambda);
      return h.value(critic ? l.critic_loss : l.ae_loss).item();
    };
    for (std::size_t s = 0; s < kFdCoordinates; ++s) {
      const std::string& id = ids[rng.below(ids.size())];
      const std::size_t i = rng.below(p.at(id).size());
      const double numeric = testing::central_difference(p.mutable_at(id)[i], loss);
      worst[which] = std::max(worst[which], testing::relative_error(grads.at(id)[i], numeric));
      ++checked[which];
    }
  }
  const bool pass = worst[0] < kFdTolerance && worst[1] < kFdTolerance && checked[0] >= kFdCoordinates &&
                    checked[1] >= kFdCoordinates;
  return {pass, fmt("critic loss worst rel err %.2e over %zu coords, autoencoder loss %.2e over %zu (< %.0e)",
                    worst[0], checked[0], worst[1], checked[1], kFdTolerance)};
}

// ---------------------------------------------------------------- 2

Outcome lof_oracle() {
  Rng rng(2024);
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    std::vector<grasp::FeatureVector> f(100, grasp::FeatureVector(8));
    for (auto& v : f)
      for (auto& x : v) x = rng.normal();
    const auto got = grasp::rarity(f, {5, 1e-9});
    const auto want = oracle::rarity(f, 5, 1e-9);
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  return {worst <= kRarityTolerance, fmt("50 instances n=100 k=5, max |diff| %.2e (<= %.0e)", worst, kRarityTolerance)};
}

// ---------------------------------------------------------------- 3

Outcome ferrari_canny_properties() {
  using grasp::Contact;
  const double r = 0.03;
  const std::vector<Contact> sphere{{{-r, 0, 0}, {-1, 0, 0}}, {{r, 0, 0}, {1, 0, 0}}};
  grasp::GraspConfig config;  // mu 0.5, 8 edges, default patch radius
  const auto model = grasp::contact_model(config, r);

  const double single = grasp::ferrari_canny(std::vector<Contact>{sphere[0]}, geometry::Vec3::Zero(), model);
  auto frictionless = model;
  frictionless.friction = 0.0;
  const double q0 = grasp::ferrari_canny(sphere, geometry::Vec3::Zero(), frictionless);
  const double q = grasp::ferrari_canny(sphere, geometry::Vec3::Zero(), model);
  std::vector<oracle::Wrench6> dense;
  for (const auto& c : sphere)
    oracle::add_contact_wrenches(dense, c.point, c.normal, 0.5, 64, geometry::Vec3::Zero(), r, model.patch_radius);
  const double want = oracle::dense_margin(dense);
  const double rel = std::abs(q - want) / want;

  // Monotone in mu on the sphere grasp and on perturbed antipodal grasps.
  Rng rng(9);
  bool monotone = true;
  std::vector<std::vector<Contact>> grasps{sphere};
  for (int i = 0; i < 20; ++i) {
    const geometry::Vec3 d = geometry::Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
    auto jitter = [&] { return 0.15 * geometry::Vec3(rng.normal(), rng.normal(), rng.normal()).normalized(); };
    const geometry::Vec3 off = 0.01 * geometry::Vec3(rng.normal(), rng.normal(), rng.normal());
    grasps.push_back({{off - 0.02 * d, (-d + jitter()).normalized()}, {off + 0.02 * d, (d + jitter()).normalized()}});
  }
  std::string sphere_series;
  for (const auto& g : grasps) {
    double prev = -1.0;
    for (double mu : {0.0, 0.2, 0.4, 0.6}) {
      auto m = model;
      m.friction = mu;
      const double v = grasp::ferrari_canny(g, geometry::Vec3::Zero(), m);
      if (v < prev - 1e-12) monotone = false;
      prev = v;
      if (&g == &grasps.front()) sphere_series += fmt("%s%.4g", sphere_series.empty() ? "" : "/", v);
    }
  }
  const bool pass = single == 0.0 && q0 == 0.0 && q > 0.0 && rel <= kDenseConeTolerance && monotone;
  return {pass, fmt("single %.3g, mu=0 %.3g, mu=0.5 Q %.5g vs dense m=64 %.5g (rel %.3f <= %.2f), "
                    "monotone over 21 grasps %s (sphere %s)",
                    single, q0, q, want, rel, kDenseConeTolerance, monotone ? "yes" : "no", sphere_series.c_str())};
}

// ---------------------------------------------------------------- 4

Outcome geometry_fidelity() {
  const auto sphere = geometry::make_uv_sphere(1.0, 128, 64);
  const auto grid = geometry::voxelize(sphere, 64).grid;
  const double vs = grid.voxel_size();
  const double analytic = 4.0 / 3.0 * std::numbers::pi;
  const double occupancy = static_cast<double>(grid.occupied_count()) * vs * vs * vs;
  const double occ_err = std::abs(occupancy - analytic) / analytic;

  const auto mesh = geometry::marching_cubes(grid);
  const double mc_err = std::abs(mesh.signed_volume() - analytic) / analytic;
  const bool watertight = mesh.is_watertight();

  const auto smooth = geometry::smooth_mesh(mesh, {10, 0.0, 0.5});
  const double shrink = (mesh.signed_volume() - smooth.signed_volume()) / mesh.signed_volume();

  const bool pass = occ_err < kGeometryTolerance && watertight && mc_err < kGeometryTolerance &&
                    std::abs(shrink) < kGeometryTolerance;
  return {pass, fmt("64^3 occupancy err %.4f, marching cubes %s with volume err %.4f, HC 10-iteration shrink %.4f "
                    "(all < %.2f)",
                    occ_err, watertight ? "watertight" : "NOT watertight", mc_err, shrink, kGeometryTolerance)};
}

// ---------------------------------------------------------------- 5, 6

struct ToyTraining {
  pipeline::PipelineConfig config;
  std::vector<geometry::VoxelGrid> grids;
  engine::ParameterSet phase1;
  double seconds = 0.0;
  bool trained = false;  // false when loaded from --phase1
};

std::optional<ToyTraining> toy_state;
std::optional<fs::path> phase1_path;

ToyTraining& toy_training() {
  if (toy_state) return *toy_state;
  ToyTraining t;
  for (const auto& s : geometry::make_toy_corpus(t.config.corpus.count, t.config.seed))
    t.grids.push_back(geometry::voxelize(s.mesh, t.config.model.resolution).grid);
  const auto t0 = std::chrono::steady_clock::now();
  if (phase1_path) {
    t.phase1 = engine::load_checkpoint(*phase1_path);
  } else {
    model::TrainingConfig training = t.config.training;
    training.phase2_epochs = 0;
    training.iou_every = 0;
    t.phase1 = model::train(t.grids, t.config.model, training, t.config.seed).params;
    t.trained = true;
  }
  t.seconds = seconds_since(t0);
  toy_state = std::move(t);
  return *toy_state;
}

Outcome toy_training_iou() {
  auto& t = toy_training();
  const double iou = model::mean_reconstruction_iou(t.config.model, t.phase1, t.grids);
  const bool pass = iou >= kIouTarget && (!t.trained || t.seconds <= kTrainingBudgetSeconds);
  return {pass, fmt("%zu shapes at %u^3, %d phase-1 epochs: mean IoU %.4f (>= %.1f), %s %.0f s (<= %.0f s)",
                    t.grids.size(), t.config.model.resolution, t.config.training.phase1_epochs, iou, kIouTarget,
                    t.trained ? "trained in" : "loaded in", t.seconds, kTrainingBudgetSeconds)};
}

Outcome critic_trend() {
  auto& t = toy_training();
  model::TrainingConfig phase2 = t.config.training;
  phase2.phase1_epochs = 0;
  phase2.iou_every = 0;
  model::ModelConfig with_critic = t.config.model;
  model::ModelConfig ae_only = t.config.model;
  ae_only.lambda = 0.0;  // same schedule, critic feedback switched off
  const auto t0 = std::chrono::steady_clock::now();
  const auto critic_params = model::train(t.grids, with_critic, phase2, t.config.seed, t.phase1).params;
  const auto ae_params = model::train(t.grids, ae_only, phase2, t.config.seed, t.phase1).params;

  const std::vector<double> alphas{0.1, 0.25, 0.5};
  const auto pairs = augment::random_index_pairs(t.grids.size(), kTrendPairs, derive_seed(t.config.seed, "trend"));
  const auto ae = augment::interpolation_outliers(t.config.model, ae_params, t.grids, pairs, alphas);
  const auto cr = augment::interpolation_outliers(t.config.model, critic_params, t.grids, pairs, alphas);
  auto non_decreasing = [](const std::vector<augment::OutlierSummary>& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].mean_outlier_percentage < s[i - 1].mean_outlier_percentage) return false;
    return true;
  };
  const bool a_ok = non_decreasing(ae), c_ok = non_decreasing(cr);
  const bool b_ok = cr[2].mean_outlier_percentage <= ae[2].mean_outlier_percentage;
  return {a_ok && c_ok && b_ok,
          fmt("%zu pairs, mean outlier%% at alpha 0.1/0.25/0.5: AE %.3f/%.3f/%.3f (%s), AE-Critic %.3f/%.3f/%.3f "
              "(%s); at 0.5 AE-Critic %s AE; phase 2 x2 in %.0f s",
              pairs.size(), ae[0].mean_outlier_percentage, ae[1].mean_outlier_percentage,
              ae[2].mean_outlier_percentage, a_ok ? "non-decreasing" : "NOT non-decreasing",
              cr[0].mean_outlier_percentage, cr[1].mean_outlier_percentage, cr[2].mean_outlier_percentage,
              c_ok ? "non-decreasing" : "NOT non-decreasing", b_ok ? "<=" : ">", seconds_since(t0))};
}

// ---------------------------------------------------------------- 7

Outcome ratio_counts() {
  augment::DatasetManifest base;
  for (int i = 0; i < 50; ++i) base.entries.push_back({"o" + std::to_string(i), "o.obj"});
  std::vector<augment::ManifestEntry> pool;
  for (int i = 0; i < 150; ++i) {
    augment::ManifestEntry e{"g" + std::to_string(i), "g.obj", augment::Provenance::kGenerated};
    e.parents = augment::GenerationPair{"o0", "o1", augment::Metric::kRarity, 2};
    e.alpha = 0.25;
    pool.push_back(e);
  }
  const std::vector<double> ratios{0, 0.5, 1, 1.5, 2};
  const std::vector<std::size_t> expected{0, 25, 50, 75, 100};
  std::string got;
  bool pass = true;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const auto m = augment::augment_dataset(base, pool, ratios[i], 1);
    const auto n = m.count(augment::Provenance::kGenerated);
    pass = pass && n == expected[i] && m.count(augment::Provenance::kOriginal) == 50;
    got += (i ? "/" : "") + std::to_string(n);
  }
  return {pass, "50 originals at ratios 0/0.5/1/1.5/2 give " + got + " generated entries (want 0/25/50/75/100)"};
}

// ---------------------------------------------------------------- 8

struct Shell {
  fs::path root;
  int run(const std::string& args) const {
    const std::string cmd = std::string(GRASPFORGE_CLI) + " --quiet " + args + " >/dev/null 2>>" +
                            (root / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
};

std::map<std::string, std::string> digests(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "run_report.json")
      out[e.path().lexically_relative(dir).generic_string()] = sha256_file(e.path());
  return out;
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / ("graspforge_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "config.json") << R"({
    "seed": 3, "corpus": {"count": 24},
    "model": {"resolution": 16, "latent_dim": 16, "channels": [8, 16]},
    "training": {"batch_size": 8, "phase1_epochs": 100, "phase2_epochs": 3, "phase1_learning_rate": 0.003,
                 "iou_every": 0},
    "grasp": {"samples_per_object": 10},
    "augment": {"first_rank": 1, "rank_span": 1, "ratio": 0.5},
    "evaluate": {"pairs": 10}})";
  const Shell sh{root};
  const std::string cfg = "--config " + (root / "config.json").string() + " ";
  std::vector<std::string> failures;
  std::size_t files = 0;
  for (const char* run : {"1", "2"}) {
    const fs::path d = root / run;
    const std::string s = d.string();
    const std::vector<std::pair<std::string, std::string>> steps{
        {"corpus toy", cfg + "--out " + s + "/corpus corpus toy"},
        {"corpus import", cfg + "--out " + s + "/imported corpus import --source " + s + "/corpus/meshes"},
        {"train", cfg + "--out " + s + "/model train ae-critic --corpus " + s + "/corpus"},
        {"score", cfg + "--out " + s + "/scores score --svg --corpus " + s + "/corpus --checkpoint " + s +
                      "/model/ae-critic.bin"},
        {"generate", cfg + "--out " + s + "/gen generate --corpus " + s + "/corpus --scores " + s +
                         "/scores/scores.json --checkpoint " + s + "/model/ae-critic.bin"},
        {"evaluate", cfg + "--out " + s + "/eval evaluate --corpus " + s + "/corpus --checkpoint-a " + s +
                         "/model/ae.bin --checkpoint-b " + s + "/model/ae-critic.bin"}};
    for (const auto& [name, args] : steps)
      if (sh.run(args) != 0) failures.push_back(name + " exited nonzero (run " + run + ")");
  }
  std::string differing;
  if (failures.empty()) {
    for (const char* sub : {"corpus", "imported", "model", "scores", "gen", "eval"}) {
      const auto a = digests(root / "1" / sub), b = digests(root / "2" / sub);
      files += a.size();
      if (a != b || a.empty()) differing += std::string(differing.empty() ? "" : ",") + sub;
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  if (!failures.empty()) return {false, failures.front()};
  if (!differing.empty()) return {false, "outputs differ between reruns in: " + differing};
  return {true, fmt("corpus toy/import, train, score, generate, evaluate rerun with seed 3: %zu primary files "
                    "byte-identical",
                    files)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--phase1" && i + 1 < argc)
      phase1_path = argv[++i];
    else
      wanted.insert(std::atoi(a.c_str()));
  }
  if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradients},     {"LOF oracle equivalence", lof_oracle},
      {"Ferrari-Canny properties", ferrari_canny_properties},
      {"geometry fidelity", geometry_fidelity}, {"toy training", toy_training_iou},
      {"critic trend", critic_trend},           {"pipeline arithmetic", ratio_counts},
      {"determinism", cli_determinism}};

  int failed = 0, ran = 0;
  for (int n : wanted) {
    if (n < 1 || n > static_cast<int>(criteria.size())) continue;
    const auto& [name, fn] = criteria[n - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    ++ran;
    failed += !o.pass;
    std::printf("criterion %d %s  %s: %s [%.1f s]\n", n, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
