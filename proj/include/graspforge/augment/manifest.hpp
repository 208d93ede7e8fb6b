#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graspforge/augment/selection.hpp"
#include "json.hpp"

namespace graspforge::augment {

inline constexpr int kManifestSchemaVersion = 1;

enum class Provenance { kOriginal, kGenerated };

struct ManifestEntry {
  std::string id;
  std::string mesh_path;  // relative to the manifest's directory
  Provenance provenance = Provenance::kOriginal;
  std::optional<GenerationPair> parents;  // generated entries only
  std::optional<double> alpha;            // generated entries only
  std::map<std::string, double> scores;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  int schema_version = kManifestSchemaVersion;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<ManifestEntry> entries;

  std::size_t count(Provenance p) const;
  bool operator==(const DatasetManifest&) const = default;
};

nlohmann::json to_json(const ManifestEntry& e);
ManifestEntry manifest_entry_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);  // throws DataError

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Checks unique ids, parent references of generated entries and, when `root`
/// is non-empty, that every mesh path exists below it. Throws DataError.
void validate_manifest(const DatasetManifest& m, const std::filesystem::path& root = {});

/// round(ratio * originals), half away from zero.
std::size_t generated_count(std::size_t originals, double ratio);

/// Copy of `original` with round(ratio * |original entries|) of `generated`
/// appended, chosen uniformly without replacement by `seed` and kept in their
/// candidate order. Records seed and ratio. Throws DataError on a shortfall.
DatasetManifest augment_dataset(const DatasetManifest& original, const std::vector<ManifestEntry>& generated,
                                double ratio, std::uint64_t seed);

}  // namespace graspforge::augment
