// graspforge command line: corpus, train, score, generate, evaluate.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graspforge/core/error.hpp"
#include "graspforge/pipeline/commands.hpp"
#include "graspforge/pipeline/config.hpp"
#include "graspforge/pipeline/corpus.hpp"
#include "graspforge/pipeline/report.hpp"

namespace gp = graspforge::pipeline;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitConfig = 4;
constexpr int kExitInternal = 1;

int fail(const std::string& command, const std::string& kind, int code, const std::string& message,
         const json& details = nullptr) {
  json err{{"kind", kind}, {"exit_code", code}, {"command", command}, {"message", message}};
  if (!details.is_null()) err["details"] = details;
  std::cerr << json{{"error", err}}.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graspforge: grasp-oriented dataset augmentation by latent interpolation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  bool quiet = false;
  app.add_option("--config", config_path, "pipeline config JSON (defaults when omitted)");
  app.add_option("--seed", seed, "seed overriding the config");
  app.add_option("--out", out, "output directory");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "no progress lines on stderr");

  // corpus
  auto* corpus = app.add_subcommand("corpus", "write a toy corpus or import OBJ files");
  std::string corpus_kind, source;
  std::optional<std::size_t> count;
  corpus->add_option("kind", corpus_kind, "toy | import")->required()->check(CLI::IsMember({"toy", "import"}));
  corpus->add_option("--count", count, "number of toy shapes");
  corpus->add_option("--source", source, "directory of .obj files (import)");

  // train
  auto* train = app.add_subcommand("train", "train the autoencoder (ae) or the AE-Critic (ae-critic)");
  std::string train_mode, train_corpus, init;
  std::optional<int> phase1_epochs, phase2_epochs;
  train->add_option("mode", train_mode, "ae | ae-critic")->required()->check(CLI::IsMember({"ae", "ae-critic"}));
  train->add_option("--corpus", train_corpus, "corpus directory or manifest")->required();
  train->add_option("--init", init, "phase-1 checkpoint to start ae-critic training from");
  train->add_option("--phase1-epochs", phase1_epochs);
  train->add_option("--phase2-epochs", phase2_epochs);

  // score
  auto* score = app.add_subcommand("score", "rarity and graspness for every corpus shape");
  std::string score_corpus, score_checkpoint;
  bool svg = false, oracle = false;
  std::optional<std::size_t> samples;
  score->add_option("--corpus", score_corpus, "corpus directory or manifest")->required();
  score->add_option("--checkpoint", score_checkpoint, "trained checkpoint")->required();
  score->add_option("--samples", samples, "grasp samples per object");
  score->add_flag("--svg", svg, "also write SVG histograms and the PCA scatter");
  score->add_flag("--oracle", oracle)->group("");

  // generate
  auto* generate = app.add_subcommand("generate", "select, pair, generate and assemble the augmented manifest");
  std::string gen_corpus, gen_scores, gen_checkpoint;
  std::optional<double> ratio, percentile;
  generate->add_option("--corpus", gen_corpus, "corpus directory or manifest")->required();
  generate->add_option("--scores", gen_scores, "scores.json from the score command")->required();
  generate->add_option("--checkpoint", gen_checkpoint, "trained checkpoint")->required();
  generate->add_option("--ratio", ratio, "generated : original ratio");
  generate->add_option("--percentile", percentile, "selection percentile t");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "outlier percentage of interpolants for two checkpoints");
  std::string eval_corpus, ckpt_a, ckpt_b;
  std::vector<double> alphas;
  std::optional<std::size_t> pairs;
  evaluate->add_option("--corpus", eval_corpus, "corpus directory or manifest")->required();
  evaluate->add_option("--checkpoint-a", ckpt_a)->required();
  evaluate->add_option("--checkpoint-b", ckpt_b)->required();
  evaluate->add_option("--alphas", alphas, "comma-separated weights in [0, 0.5]")->delimiter(',');
  evaluate->add_option("--pairs", pairs, "random corpus pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fail("", "usage", kExitUsage, e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  std::string command = sub->get_name();
  if (out.empty()) return fail(command, "usage", kExitUsage, "--out is required");

  try {
    gp::CommandContext ctx;
    ctx.config = config_path.empty() ? gp::PipelineConfig{} : gp::load_pipeline_config(config_path);
    if (seed) ctx.config.seed = *seed;
    if (count) ctx.config.corpus.count = *count;
    if (phase1_epochs) ctx.config.training.phase1_epochs = *phase1_epochs;
    if (phase2_epochs) ctx.config.training.phase2_epochs = *phase2_epochs;
    if (samples) ctx.config.grasp.samples_per_object = *samples;
    if (ratio) ctx.config.augment.ratio = *ratio;
    if (percentile) ctx.config.augment.percentile = *percentile;
    if (!alphas.empty()) ctx.config.evaluate.alphas = alphas;
    if (pairs) ctx.config.evaluate.pairs = *pairs;
    ctx.config.validate();
    ctx.out = out;
    ctx.jobs = jobs;
    ctx.verbose = !quiet;

    const auto start = std::chrono::steady_clock::now();
    gp::RunReport report;
    if (sub == corpus) {
      command += " " + corpus_kind;
      if (corpus_kind == "import" && source.empty()) throw graspforge::ConfigError("corpus import needs --source");
      report = gp::run_corpus(ctx, corpus_kind == "toy" ? gp::CorpusKind::kToy : gp::CorpusKind::kImport, source);
    } else if (sub == train) {
      command += " " + train_mode;
      std::optional<std::filesystem::path> init_path;
      if (!init.empty()) init_path = init;
      report = gp::run_train(ctx, train_corpus, train_mode == "ae" ? gp::TrainMode::kAe : gp::TrainMode::kAeCritic,
                             init_path);
    } else if (sub == score) {
      report = gp::run_score(ctx, score_corpus, score_checkpoint, svg, oracle);
    } else if (sub == generate) {
      report = gp::run_generate(ctx, gen_corpus, gen_scores, gen_checkpoint);
    } else {
      report = gp::run_evaluate(ctx, eval_corpus, ckpt_a, ckpt_b);
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    gp::write_json(ctx.out / "run_report.json", gp::to_json(report));
    std::cout << report.summary.dump() << std::endl;
    return 0;
  } catch (const gp::ImportError& e) {
    json files = json::array();
    for (const auto& issue : e.issues()) files.push_back({{"file", issue.file}, {"message", issue.message}});
    return fail(command, "data", kExitData, e.what(), json{{"files", files}});
  } catch (const graspforge::ConfigError& e) {
    return fail(command, "config", kExitConfig, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(command, "data", kExitData, e.what());
  } catch (const graspforge::Error& e) {
    return fail(command, "data", kExitData, e.what());
  } catch (const std::exception& e) {
    return fail(command, "internal", kExitInternal, e.what());
  }
}
