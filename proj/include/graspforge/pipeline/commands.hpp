#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graspforge/pipeline/config.hpp"
#include "graspforge/pipeline/report.hpp"

namespace graspforge::pipeline {

struct CommandContext {
  PipelineConfig config;
  std::filesystem::path out;
  std::size_t jobs = 1;
  bool verbose = true;  // progress lines on stderr
};

// Each command writes its primary outputs under ctx.out and returns the run
// report (the caller adds wall time and writes run_report.json).

enum class CorpusKind { kToy, kImport };
RunReport run_corpus(const CommandContext& ctx, CorpusKind kind, const std::filesystem::path& source = {});

enum class TrainMode { kAe, kAeCritic };
/// ae: phase 1 only, writes ae.bin. ae-critic: phase 2 from `init` (an ae
/// checkpoint with a matching model config) or, without one, phase 1 first
/// (also written as ae.bin); writes ae-critic.bin.
RunReport run_train(const CommandContext& ctx, const std::filesystem::path& corpus, TrainMode mode,
                    const std::optional<std::filesystem::path>& init = std::nullopt);

/// scores.json (rarity, graspness, grasp counts per shape) and
/// score_report.json (histograms and PCA scatter). `oracle` recomputes rarity
/// by brute force and fails on disagreement beyond 1e-9.
RunReport run_score(const CommandContext& ctx, const std::filesystem::path& corpus,
                    const std::filesystem::path& checkpoint, bool svg = false, bool oracle = false);

/// Select, pair, generate and assemble: generated/<id>.obj, manifest.json and
/// generation_log.json.
RunReport run_generate(const CommandContext& ctx, const std::filesystem::path& corpus,
                       const std::filesystem::path& scores, const std::filesystem::path& checkpoint);

/// Mean completeness outlier percentage of interpolants per alpha for two
/// checkpoints over the same seeded corpus pairs: evaluation.json.
RunReport run_evaluate(const CommandContext& ctx, const std::filesystem::path& corpus,
                       const std::filesystem::path& checkpoint_a, const std::filesystem::path& checkpoint_b);

}  // namespace graspforge::pipeline
