#include "graspforge/pipeline/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "graspforge/augment/generation.hpp"
#include "graspforge/augment/manifest.hpp"
#include "graspforge/augment/selection.hpp"
#include "graspforge/core/digest.hpp"
#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"
#include "graspforge/engine/checkpoint.hpp"
#include "graspforge/geometry/completeness.hpp"
#include "graspforge/geometry/obj_io.hpp"
#include "graspforge/geometry/pca.hpp"
#include "graspforge/grasp/graspness.hpp"
#include "graspforge/grasp/rarity.hpp"
#include "graspforge/model/ae_critic.hpp"
#include "graspforge/model/trainer.hpp"
#include "graspforge/pipeline/corpus.hpp"

namespace graspforge::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void progress(const CommandContext& ctx, const std::string& line) {
  if (ctx.verbose) std::fprintf(stderr, "%s\n", line.c_str());
}

struct LoadedModel {
  model::ModelSidecar sidecar;
  engine::ParameterSet params;
  std::string digest;
};

LoadedModel load_model(const fs::path& checkpoint) {
  if (!fs::exists(checkpoint)) throw DataError("missing checkpoint " + checkpoint.string());
  LoadedModel m;
  m.sidecar = model::load_sidecar(checkpoint);
  m.params = engine::load_checkpoint(checkpoint);
  model::check_parameters(m.sidecar.model, m.params);
  m.digest = sha256_file(checkpoint);
  return m;
}

// The checkpoint defines the network; a different model section in the
// config is overridden and reported.
PipelineConfig with_checkpoint_model(const CommandContext& ctx, const LoadedModel& m, RunReport& report) {
  PipelineConfig c = ctx.config;
  if (!(c.model == m.sidecar.model)) {
    report.warnings.push_back("model section replaced by the checkpoint's own configuration");
    c.model = m.sidecar.model;
  }
  return c;
}

json output_header(const PipelineConfig& c) {
  return json{{"schema_version", kSchemaVersion}, {"seed", c.seed}, {"config", to_json(c)}};
}

std::vector<model::LatentVector> encode_corpus(const model::ModelConfig& cfg, const engine::ParameterSet& params,
                                               const std::vector<geometry::VoxelGrid>& grids, std::size_t jobs) {
  std::vector<model::LatentVector> z(grids.size());
  parallel_for(grids.size(), jobs, [&](std::size_t i) { z[i] = model::encode(cfg, params, grids[i]); });
  return z;
}

}  // namespace

// --- corpus ---

RunReport run_corpus(const CommandContext& ctx, CorpusKind kind, const fs::path& source) {
  RunReport report;
  report.command = kind == CorpusKind::kToy ? "corpus toy" : "corpus import";
  const auto manifest =
      kind == CorpusKind::kToy ? write_toy_corpus(ctx.config, ctx.out) : import_corpus(ctx.config, source, ctx.out);
  for (const auto& e : manifest.entries) add_output(report, ctx.out, ctx.out / e.mesh_path);
  add_output(report, ctx.out, ctx.out / kManifestFile);
  report.summary = {{"shapes", manifest.entries.size()}, {"seed", ctx.config.seed}};
  return report;
}

// --- train ---

namespace {

json phase_section(const model::TrainingReport& r, int phase, const model::TrainingConfig& t) {
  json epochs = json::array();
  const json all = model::to_json(r).at("epochs");
  for (const auto& e : all)
    if (e.at("phase") == phase) epochs.push_back(e);
  json s{{"phase", phase}, {"epochs", epochs}};
  if (phase == 1) {
    s["learning_rate"] = t.phase1_learning_rate;
  } else {
    s["learning_rates"] = {{"autoencoder", t.ae_learning_rate}, {"critic", t.critic_learning_rate}};
  }
  if (!epochs.empty()) s["final_iou"] = epochs.back().at("iou");
  return s;
}

}  // namespace

RunReport run_train(const CommandContext& ctx, const fs::path& corpus_path, TrainMode mode,
                    const std::optional<fs::path>& init) {
  RunReport report;
  report.command = mode == TrainMode::kAe ? "train ae" : "train ae-critic";
  const PipelineConfig& cfg = ctx.config;
  if (mode == TrainMode::kAe && init) throw ConfigError("--init only applies to ae-critic training");

  const auto corpus = load_corpus(corpus_path);
  report.inputs["corpus_manifest"] = sha256_file(corpus.root / kManifestFile);
  const auto grids = voxelize_corpus(corpus, cfg.model.resolution);
  progress(ctx, "voxelized " + std::to_string(grids.size()) + " shapes at " + std::to_string(cfg.model.resolution) +
                    "^3");

  auto on_epoch = [&](const model::EpochRecord& e) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "phase %d epoch %d: ae loss %.5f%s", e.phase, e.epoch, e.ae_loss,
                  e.iou ? (" iou " + std::to_string(*e.iou)).c_str() : "");
    progress(ctx, buf);
  };

  fs::create_directories(ctx.out);
  json phases = json::array();
  std::optional<engine::ParameterSet> phase1;
  std::string phase1_digest;

  if (init) {
    const auto m = load_model(*init);
    if (!(m.sidecar.model == cfg.model))
      throw ConfigError("checkpoint " + init->string() + " was built for resolution " +
                        std::to_string(m.sidecar.model.resolution) + " with a different model configuration");
    if (m.sidecar.stage != "ae") throw ConfigError("ae-critic training starts from an ae checkpoint, got stage \"" +
                                                   m.sidecar.stage + "\"");
    phase1 = m.params;
    phase1_digest = m.digest;
    report.inputs["init_checkpoint"] = m.digest;
  } else {
    model::TrainingConfig t = cfg.training;
    t.phase2_epochs = 0;
    auto result = model::train(grids, cfg.model, t, cfg.seed, std::nullopt, on_epoch);
    const fs::path path = ctx.out / "ae.bin";
    engine::save_checkpoint(result.params, path);
    model::save_sidecar({cfg.model, cfg.training, cfg.seed, "ae"}, path);
    add_output(report, ctx.out, path);
    add_output(report, ctx.out, model::sidecar_path(path));
    phases.push_back(phase_section(result.report, 1, cfg.training));
    phase1 = std::move(result.params);
    phase1_digest = sha256_file(path);
  }

  if (mode == TrainMode::kAeCritic) {
    model::TrainingConfig t = cfg.training;
    t.phase1_epochs = 0;
    auto result = model::train(grids, cfg.model, t, cfg.seed, phase1, on_epoch);
    const fs::path path = ctx.out / "ae-critic.bin";
    engine::save_checkpoint(result.params, path);
    model::save_sidecar({cfg.model, cfg.training, cfg.seed, "ae-critic"}, path);
    add_output(report, ctx.out, path);
    add_output(report, ctx.out, model::sidecar_path(path));
    phases.push_back(phase_section(result.report, 2, cfg.training));
  }

  json training_report = output_header(cfg);
  training_report["mode"] = mode == TrainMode::kAe ? "ae" : "ae-critic";
  training_report["corpus_shapes"] = grids.size();
  training_report["phase1_checkpoint"] = phase1_digest;
  training_report["phases"] = phases;
  write_json(ctx.out / "training_report.json", training_report);
  add_output(report, ctx.out, ctx.out / "training_report.json");

  report.summary = {{"mode", training_report["mode"]}, {"phases", phases.size()}};
  for (const auto& p : phases) report.summary["phase" + std::to_string(p.at("phase").get<int>()) + "_iou"] =
      p.value("final_iou", json());
  return report;
}

// --- score ---

RunReport run_score(const CommandContext& ctx, const fs::path& corpus_path, const fs::path& checkpoint, bool svg,
                    bool oracle) {
  RunReport report;
  report.command = "score";
  const auto m = load_model(checkpoint);
  const PipelineConfig cfg = with_checkpoint_model(ctx, m, report);
  const auto corpus = load_corpus(corpus_path);
  report.inputs["corpus_manifest"] = sha256_file(corpus.root / kManifestFile);
  report.inputs["checkpoint"] = m.digest;

  const auto grids = voxelize_corpus(corpus, cfg.model.resolution);
  const auto latents = encode_corpus(cfg.model, m.params, grids, ctx.jobs);
  const auto rarity = grasp::rarity(latents, cfg.rarity);
  progress(ctx, "rarity done for " + std::to_string(latents.size()) + " shapes");

  const std::size_t n = corpus.ids.size();
  std::vector<grasp::GraspnessResult> grasp_results(n);
  std::vector<std::size_t> n_grasps(n);
  std::size_t done = 0;
  std::mutex mu;
  parallel_for(n, ctx.jobs, [&](std::size_t i) {
    grasp_results[i] =
        grasp::evaluate_graspness(corpus.meshes[i], cfg.grasp, derive_seed(cfg.seed, "graspness/" + corpus.ids[i]));
    n_grasps[i] = grasp_results[i].candidates.size();
    grasp_results[i].candidates.clear();
    std::lock_guard lock(mu);
    if (++done % 10 == 0 || done == n) progress(ctx, "graspness " + std::to_string(done) + "/" + std::to_string(n));
  });

  json table = output_header(cfg);
  table["checkpoint"] = m.digest;
  table["corpus_manifest"] = report.inputs["corpus_manifest"];
  json scores = json::object();
  std::vector<double> graspness(n);
  for (std::size_t i = 0; i < n; ++i) {
    graspness[i] = grasp_results[i].graspness;
    scores[corpus.ids[i]] = {{"rarity", rarity[i]},
                             {"graspness", grasp_results[i].graspness},
                             {"n_grasps", n_grasps[i]},
                             {"successes", grasp_results[i].successes}};
  }
  table["scores"] = scores;

  const auto [rmin, rmax] = std::minmax_element(rarity.begin(), rarity.end());
  const Histogram rarity_hist = make_histogram(rarity, 10, *rmin, *rmax);
  const Histogram grasp_hist = make_histogram(graspness, 10, 0.0, 1.0);
  json score_report = output_header(cfg);
  score_report["histograms"] = {{"rarity", to_json(rarity_hist)}, {"graspness", to_json(grasp_hist)}};
  if (n >= 2) {
    const auto pca = geometry::pca_project(latents, 2);
    json points = json::array();
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
      px[i] = pca.projection(static_cast<Eigen::Index>(i), 0);
      py[i] = pca.projection.cols() > 1 ? pca.projection(static_cast<Eigen::Index>(i), 1) : 0.0;
      points.push_back({{"id", corpus.ids[i]}, {"x", px[i]}, {"y", py[i]}, {"graspness", graspness[i]}});
    }
    std::vector<double> eig(pca.eigenvalues.data(), pca.eigenvalues.data() + pca.eigenvalues.size());
    score_report["pca"] = {{"eigenvalues", eig}, {"points", points}};
    if (svg) {
      write_text(ctx.out / "pca_scatter.svg", scatter_svg(px, py, graspness, "Latent PCA"));
      add_output(report, ctx.out, ctx.out / "pca_scatter.svg");
    }
  }
  if (oracle) {
    const auto check = oracle_rarity(latents, cfg.rarity.k, cfg.rarity.distance_floor);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(check[i] - rarity[i]));
    report.summary["oracle"] = {{"max_abs_difference", worst}, {"agrees", worst <= 1e-9}};
    if (!(worst <= 1e-9))
      throw DataError("rarity disagrees with the brute-force oracle by " + std::to_string(worst));
  }

  fs::create_directories(ctx.out);
  write_json(ctx.out / "scores.json", table);
  write_json(ctx.out / "score_report.json", score_report);
  add_output(report, ctx.out, ctx.out / "scores.json");
  add_output(report, ctx.out, ctx.out / "score_report.json");
  if (svg) {
    write_text(ctx.out / "rarity_histogram.svg", histogram_svg(rarity_hist, "Rarity", "rarity score"));
    write_text(ctx.out / "graspness_histogram.svg", histogram_svg(grasp_hist, "Graspness", "graspness score"));
    add_output(report, ctx.out, ctx.out / "rarity_histogram.svg");
    add_output(report, ctx.out, ctx.out / "graspness_histogram.svg");
  }
  double gsum = 0.0;
  for (double g : graspness) gsum += g;
  report.summary["shapes"] = n;
  report.summary["mean_graspness"] = gsum / static_cast<double>(n);
  report.summary["rarity_range"] = {*rmin, *rmax};
  return report;
}

// --- generate ---

RunReport run_generate(const CommandContext& ctx, const fs::path& corpus_path, const fs::path& scores_path,
                       const fs::path& checkpoint) {
  RunReport report;
  report.command = "generate";
  const auto m = load_model(checkpoint);
  const PipelineConfig cfg = with_checkpoint_model(ctx, m, report);
  const auto corpus = load_corpus(corpus_path);
  const json table = read_json(scores_path);
  report.inputs["corpus_manifest"] = sha256_file(corpus.root / kManifestFile);
  report.inputs["checkpoint"] = m.digest;
  report.inputs["scores"] = sha256_file(scores_path);
  if (table.value("checkpoint", std::string()) != m.digest)
    throw DataError("score table " + scores_path.string() + " was computed with a different checkpoint");

  std::map<std::string, double> rarity, graspness;
  try {
    for (const auto& id : corpus.ids) {
      if (!table.at("scores").contains(id)) throw DataError("score table has no entry for shape '" + id + "'");
      rarity[id] = table.at("scores").at(id).at("rarity").get<double>();
      graspness[id] = table.at("scores").at(id).at("graspness").get<double>();
    }
  } catch (const json::exception& e) {
    throw DataError("malformed score table: " + std::string(e.what()));
  }

  const auto grids = voxelize_corpus(corpus, cfg.model.resolution);
  std::map<std::string, geometry::VoxelGrid> parents;
  for (std::size_t i = 0; i < grids.size(); ++i) parents.emplace(corpus.ids[i], grids[i]);
  const auto z = encode_corpus(cfg.model, m.params, grids, ctx.jobs);
  std::map<std::string, model::LatentVector> latents;
  for (std::size_t i = 0; i < z.size(); ++i) latents.emplace(corpus.ids[i], z[i]);

  // Pairs per metric, concatenated; a pair already formed under the first
  // metric is not repeated.
  const auto& ac = cfg.augment;
  std::vector<augment::GenerationPair> pairs;
  std::set<std::pair<std::string, std::string>> seen;
  json selected_log = json::object();
  std::size_t cross_duplicates = 0;
  for (auto metric : {augment::Metric::kRarity, augment::Metric::kGraspness}) {
    const auto& scores = metric == augment::Metric::kRarity ? rarity : graspness;
    const auto selected = augment::select_high_scoring(scores, ac.percentile);
    selected_log[augment::metric_name(metric)] = selected;
    progress(ctx, augment::metric_name(metric) + ": " + std::to_string(selected.size()) + " shapes selected");
    for (auto& p : augment::form_generation_pairs(selected, latents, ac.first_rank, ac.rank_span, metric)) {
      if (seen.insert(std::minmax(p.a, p.b)).second)
        pairs.push_back(std::move(p));
      else
        ++cross_duplicates;
    }
  }
  progress(ctx, std::to_string(pairs.size()) + " generation pairs");

  const auto result = augment::generate_shapes(pairs, ac.alphas, cfg.model, m.params, parents, m.digest,
                                               augment::generation_settings(ac, ctx.jobs));
  progress(ctx, std::to_string(result.shapes.size()) + " shapes generated, " +
                    std::to_string(result.rejections.size()) + " rejected");

  fs::create_directories(ctx.out / "generated");
  std::vector<augment::ManifestEntry> candidates;
  for (const auto& s : result.shapes) {
    augment::ManifestEntry e;
    e.id = s.id;
    e.mesh_path = "generated/" + s.id + ".obj";
    e.provenance = augment::Provenance::kGenerated;
    e.parents = s.pair;
    e.alpha = s.alpha;
    e.scores = {{"outlier_percentage", s.completeness.outlier_percentage}};
    geometry::save_mesh(s.mesh, ctx.out / e.mesh_path);
    candidates.push_back(std::move(e));
  }

  augment::DatasetManifest original;
  original.seed = cfg.seed;
  original.config = to_json(cfg);
  const fs::path out_abs = fs::weakly_canonical(ctx.out);
  for (std::size_t i = 0; i < corpus.ids.size(); ++i) {
    augment::ManifestEntry e = corpus.manifest.entries[i];
    e.mesh_path = fs::weakly_canonical(corpus.root / e.mesh_path).lexically_relative(out_abs).generic_string();
    e.scores = {{"rarity", rarity.at(e.id)}, {"graspness", graspness.at(e.id)}};
    original.entries.push_back(std::move(e));
  }
  const auto manifest = augment::augment_dataset(original, candidates, ac.ratio, cfg.seed);
  augment::validate_manifest(manifest, ctx.out);
  augment::save_manifest(manifest, ctx.out / kManifestFile);

  json log = output_header(cfg);
  log["checkpoint"] = m.digest;
  log["selected"] = selected_log;
  json pair_log = json::array();
  for (const auto& p : pairs) pair_log.push_back(augment::to_json(p));
  log["pairs"] = pair_log;
  log["cross_metric_duplicates"] = cross_duplicates;
  json rejections = json::array();
  for (const auto& r : result.rejections) rejections.push_back(augment::to_json(r));
  log["rejections"] = rejections;
  log["candidates"] = candidates.size();
  log["appended"] = manifest.count(augment::Provenance::kGenerated);
  write_json(ctx.out / "generation_log.json", log);

  for (const auto& c : candidates) add_output(report, ctx.out, ctx.out / c.mesh_path);
  add_output(report, ctx.out, ctx.out / kManifestFile);
  add_output(report, ctx.out, ctx.out / "generation_log.json");
  report.summary = {{"selected",
                     {{"rarity", selected_log["rarity"].size()}, {"graspness", selected_log["graspness"].size()}}},
                    {"pairs", pairs.size()},
                    {"generated", candidates.size()},
                    {"rejected", result.rejections.size()},
                    {"originals", manifest.count(augment::Provenance::kOriginal)},
                    {"appended", manifest.count(augment::Provenance::kGenerated)}};
  return report;
}

// --- evaluate ---

RunReport run_evaluate(const CommandContext& ctx, const fs::path& corpus_path, const fs::path& checkpoint_a,
                       const fs::path& checkpoint_b) {
  RunReport report;
  report.command = "evaluate";
  const PipelineConfig& cfg = ctx.config;
  const LoadedModel models[2] = {load_model(checkpoint_a), load_model(checkpoint_b)};
  if (models[0].sidecar.model.resolution != models[1].sidecar.model.resolution)
    throw ConfigError("checkpoints disagree on resolution (" + std::to_string(models[0].sidecar.model.resolution) +
                      " vs " + std::to_string(models[1].sidecar.model.resolution) + ")");
  const auto corpus = load_corpus(corpus_path);
  report.inputs["corpus_manifest"] = sha256_file(corpus.root / kManifestFile);
  report.inputs["checkpoint_a"] = models[0].digest;
  report.inputs["checkpoint_b"] = models[1].digest;

  const auto grids = voxelize_corpus(corpus, models[0].sidecar.model.resolution);
  const auto pairs = augment::random_index_pairs(grids.size(), cfg.evaluate.pairs, derive_seed(cfg.seed, "evaluate"));
  std::vector<std::size_t> second;
  for (const auto& p : pairs) second.push_back(p.second);

  const auto& alphas = cfg.evaluate.alphas;
  std::vector<augment::OutlierSummary> rows[2];
  augment::OutlierSummary baseline[2];
  for (int k = 0; k < 2; ++k) {
    const auto& mc = models[k].sidecar.model;
    rows[k] = augment::interpolation_outliers(mc, models[k].params, grids, pairs, alphas, ctx.jobs);
    baseline[k] = augment::reconstruction_outliers(mc, models[k].params, grids, second, ctx.jobs);
    progress(ctx, std::string("model ") + (k == 0 ? "a" : "b") + " evaluated");
  }

  auto cell = [](const augment::OutlierSummary& s) {
    return json{{"mean_outlier_percentage", s.mean_outlier_percentage}, {"empty", s.empty}};
  };
  json table = json::array();
  for (std::size_t a = 0; a < alphas.size(); ++a)
    table.push_back({{"alpha", alphas[a]}, {"a", cell(rows[0][a])}, {"b", cell(rows[1][a])}});

  // Trend flags over the listed alphas in ascending order.
  std::vector<std::size_t> idx(alphas.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return alphas[x] < alphas[y]; });
  bool monotone[2] = {true, true};
  for (int k = 0; k < 2; ++k)
    for (std::size_t t = 1; t < idx.size(); ++t)
      monotone[k] = monotone[k] &&
                    rows[k][idx[t]].mean_outlier_percentage >= rows[k][idx[t - 1]].mean_outlier_percentage;
  const std::size_t top = idx.back();

  json pair_ids = json::array();
  for (const auto& [i, j] : pairs) pair_ids.push_back({corpus.ids[i], corpus.ids[j]});
  json evaluation = output_header(cfg);
  evaluation["checkpoints"] = {{"a", {{"sha256", models[0].digest}, {"stage", models[0].sidecar.stage}}},
                               {"b", {{"sha256", models[1].digest}, {"stage", models[1].sidecar.stage}}}};
  evaluation["pairs"] = pair_ids;
  evaluation["baseline"] = {{"a", cell(baseline[0])}, {"b", cell(baseline[1])}};
  evaluation["rows"] = table;
  evaluation["trend"] = {{"a_non_decreasing", monotone[0]},
                         {"b_non_decreasing", monotone[1]},
                         {"max_alpha", alphas[top]},
                         {"b_at_most_a_at_max_alpha",
                          rows[1][top].mean_outlier_percentage <= rows[0][top].mean_outlier_percentage}};

  fs::create_directories(ctx.out);
  write_json(ctx.out / "evaluation.json", evaluation);
  add_output(report, ctx.out, ctx.out / "evaluation.json");
  report.summary = {{"rows", table}, {"trend", evaluation["trend"]}};
  return report;
}

}  // namespace graspforge::pipeline
