#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "graspforge/augment/manifest.hpp"
#include "graspforge/core/error.hpp"
#include "graspforge/geometry/mesh.hpp"
#include "graspforge/geometry/voxel_grid.hpp"
#include "graspforge/pipeline/config.hpp"

namespace graspforge::pipeline {

// A corpus directory holds manifest.json and meshes/<id>.obj.
inline constexpr const char* kManifestFile = "manifest.json";

struct ImportIssue {
  std::string file;
  std::string message;
};

/// Import failure listing every offending file.
class ImportError : public DataError {
 public:
  explicit ImportError(std::vector<ImportIssue> issues);
  const std::vector<ImportIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ImportIssue> issues_;
};

/// Writes config.corpus.count procedural shapes and their manifest to `out`.
augment::DatasetManifest write_toy_corpus(const PipelineConfig& config, const std::filesystem::path& out);

/// Reads every *.obj under `source` (sorted by name), checks it is a non-empty
/// watertight triangle mesh, centers it and scales its longest extent to
/// config.corpus.import_size. Nothing is written when any file fails; the
/// ImportError then names each one.
augment::DatasetManifest import_corpus(const PipelineConfig& config, const std::filesystem::path& source,
                                       const std::filesystem::path& out);

struct LoadedCorpus {
  std::filesystem::path root;
  augment::DatasetManifest manifest;
  std::vector<std::string> ids;  // manifest order
  std::vector<geometry::TriangleMesh> meshes;
};

/// Loads a corpus from its directory or its manifest file.
LoadedCorpus load_corpus(const std::filesystem::path& location);

/// Voxelizes every mesh at `resolution` (mesh-relative lattice, 0.9 fill).
std::vector<geometry::VoxelGrid> voxelize_corpus(const LoadedCorpus& corpus, std::uint32_t resolution);

/// Keeps letters, digits, '-' and '_'; anything else becomes '_'.
std::string sanitize_id(const std::string& raw);

}  // namespace graspforge::pipeline
