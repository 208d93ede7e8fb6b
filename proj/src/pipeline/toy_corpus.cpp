#include <filesystem>

#include "graspforge/geometry/obj_io.hpp"
#include "graspforge/geometry/toy_shapes.hpp"
#include "graspforge/pipeline/corpus.hpp"

namespace graspforge::pipeline {

augment::DatasetManifest write_toy_corpus(const PipelineConfig& config, const std::filesystem::path& out) {
  config.validate();
  std::filesystem::create_directories(out / "meshes");
  augment::DatasetManifest manifest;
  manifest.seed = config.seed;
  manifest.config = to_json(config);
  manifest.config["corpus_kind"] = "toy";
  for (std::size_t i = 0; i < config.corpus.count; ++i) {
    const auto shape = geometry::make_toy_shape(i, config.seed, config.corpus.random_orientation);
    const std::string rel = "meshes/" + shape.id + ".obj";
    geometry::save_mesh(shape.mesh, out / rel);
    augment::ManifestEntry e;
    e.id = shape.id;
    e.mesh_path = rel;
    manifest.entries.push_back(std::move(e));
  }
  augment::save_manifest(manifest, out / kManifestFile);
  return manifest;
}

}  // namespace graspforge::pipeline
