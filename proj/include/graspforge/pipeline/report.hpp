#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace graspforge::pipeline {

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [lo, hi]; the last bin is closed and values outside
/// the range land in the nearest end bin, so the counts always sum to the
/// number of values. A degenerate range is widened by 0.5 on each side.
Histogram make_histogram(const std::vector<double>& values, std::size_t bins, double lo, double hi);
nlohmann::json to_json(const Histogram& h);

std::string histogram_svg(const Histogram& h, const std::string& title, const std::string& x_label);
/// Scatter plot; `shade` in [0, 1] picks a color from light to dark.
std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& shade,
                        const std::string& title);

/// Brute-force rarity for cross-checking: every pairwise distance, a full
/// sort per point, densities from scratch. Same floor and tie rule as the
/// library routine.
std::vector<double> oracle_rarity(const std::vector<std::vector<double>>& features, std::size_t k,
                                  double distance_floor);

/// Pretty-printed JSON with a trailing newline; throws DataError on I/O failure.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

struct RunReport {
  std::string command;
  double wall_seconds = 0.0;
  nlohmann::json inputs = nlohmann::json::object();   // name -> sha256
  nlohmann::json outputs = nlohmann::json::object();  // relative path -> sha256
  std::vector<std::string> warnings;
  nlohmann::json summary = nlohmann::json::object();
};

nlohmann::json to_json(const RunReport& r);
/// Records the digest of `path` under `name` (file name relative to `out`).
void add_output(RunReport& r, const std::filesystem::path& out, const std::filesystem::path& path);

}  // namespace graspforge::pipeline
