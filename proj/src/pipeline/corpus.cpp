#include "graspforge/pipeline/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "graspforge/geometry/obj_io.hpp"
#include "graspforge/geometry/voxelize.hpp"

namespace graspforge::pipeline {

namespace fs = std::filesystem;

namespace {

std::string summarize(const std::vector<ImportIssue>& issues) {
  std::string s = std::to_string(issues.size()) + " file(s) could not be imported:";
  for (const auto& i : issues) s += "\n  " + i.file + ": " + i.message;
  return s;
}

}  // namespace

ImportError::ImportError(std::vector<ImportIssue> issues) : DataError(summarize(issues)), issues_(std::move(issues)) {}

std::string sanitize_id(const std::string& raw) {
  std::string out = raw;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return out.empty() ? "_" : out;
}

augment::DatasetManifest import_corpus(const PipelineConfig& config, const fs::path& source, const fs::path& out) {
  config.validate();
  if (!fs::is_directory(source)) throw DataError("import source " + source.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(source)) {
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (entry.is_regular_file() && ext == ".obj") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no .obj files in " + source.string());

  std::vector<ImportIssue> issues;
  std::vector<std::pair<std::string, geometry::TriangleMesh>> meshes;
  std::set<std::string> ids;
  for (const auto& file : files) {
    const std::string name = file.filename().string();
    try {
      auto mesh = geometry::load_mesh(file);
      if (mesh.empty()) throw DataError("mesh has no faces");
      if (!mesh.is_watertight()) throw DataError("mesh is not watertight");
      const auto box = mesh.bounds();
      const double extent = box.extent().maxCoeff();
      if (!(extent > 0.0)) throw DataError("mesh has zero extent");
      mesh.translate(-box.center());
      mesh.scale(config.corpus.import_size / extent);
      std::string id = sanitize_id(file.stem().string());
      if (!ids.insert(id).second) throw DataError("id '" + id + "' collides with an earlier file");
      meshes.emplace_back(std::move(id), std::move(mesh));
    } catch (const Error& e) {
      issues.push_back({name, e.what()});
    }
  }
  if (!issues.empty()) throw ImportError(std::move(issues));

  fs::create_directories(out / "meshes");
  augment::DatasetManifest manifest;
  manifest.seed = config.seed;
  manifest.config = to_json(config);
  manifest.config["corpus_kind"] = "import";
  for (const auto& [id, mesh] : meshes) {
    const std::string rel = "meshes/" + id + ".obj";
    geometry::save_mesh(mesh, out / rel);
    augment::ManifestEntry e;
    e.id = id;
    e.mesh_path = rel;
    manifest.entries.push_back(std::move(e));
  }
  augment::save_manifest(manifest, out / kManifestFile);
  return manifest;
}

LoadedCorpus load_corpus(const fs::path& location) {
  LoadedCorpus c;
  const fs::path file = fs::is_directory(location) ? location / kManifestFile : location;
  if (!fs::exists(file)) throw DataError("no corpus manifest at " + file.string());
  c.root = file.parent_path();
  c.manifest = augment::load_manifest(file);
  augment::validate_manifest(c.manifest, c.root);
  if (c.manifest.entries.empty()) throw DataError("corpus manifest " + file.string() + " lists no shapes");
  for (const auto& e : c.manifest.entries) {
    c.ids.push_back(e.id);
    c.meshes.push_back(geometry::load_mesh(c.root / e.mesh_path));
  }
  return c;
}

std::vector<geometry::VoxelGrid> voxelize_corpus(const LoadedCorpus& corpus, std::uint32_t resolution) {
  std::vector<geometry::VoxelGrid> out;
  out.reserve(corpus.meshes.size());
  for (const auto& m : corpus.meshes) out.push_back(geometry::voxelize(m, resolution).grid);
  return out;
}

}  // namespace graspforge::pipeline
