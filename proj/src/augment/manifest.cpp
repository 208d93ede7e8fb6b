#include "graspforge/augment/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "graspforge/augment/generation.hpp"
#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"

namespace graspforge::augment {

using nlohmann::json;

std::size_t DatasetManifest::count(Provenance p) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [p](const ManifestEntry& e) { return e.provenance == p; }));
}

json to_json(const ManifestEntry& e) {
  json j{{"id", e.id},
         {"mesh", e.mesh_path},
         {"provenance", e.provenance == Provenance::kOriginal ? "original" : "generated"},
         {"scores", e.scores}};
  if (e.parents) j["parents"] = to_json(*e.parents);
  if (e.alpha) j["alpha"] = *e.alpha;
  return j;
}

ManifestEntry manifest_entry_from_json(const json& j) {
  try {
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    e.mesh_path = j.at("mesh").get<std::string>();
    const auto prov = j.at("provenance").get<std::string>();
    if (prov == "original")
      e.provenance = Provenance::kOriginal;
    else if (prov == "generated")
      e.provenance = Provenance::kGenerated;
    else
      throw DataError("manifest entry '" + e.id + "' has unknown provenance \"" + prov + "\"");
    if (j.contains("scores")) e.scores = j.at("scores").get<std::map<std::string, double>>();
    if (j.contains("parents")) e.parents = generation_pair_from_json(j.at("parents"));
    if (j.contains("alpha")) e.alpha = j.at("alpha").get<double>();
    return e;
  } catch (const json::exception& ex) {
    throw DataError(std::string("malformed manifest entry: ") + ex.what());
  }
}

json to_json(const DatasetManifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) entries.push_back(to_json(e));
  return json{{"schema_version", m.schema_version}, {"seed", m.seed}, {"config", m.config}, {"entries", entries}};
}

DatasetManifest manifest_from_json(const json& j) {
  try {
    DatasetManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kManifestSchemaVersion)
      throw DataError("unsupported manifest schema version " + std::to_string(m.schema_version));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.value("config", json::object());
    for (const auto& e : j.at("entries")) m.entries.push_back(manifest_entry_from_json(e));
    return m;
  } catch (const json::exception& ex) {
    throw DataError(std::string("malformed manifest: ") + ex.what());
  }
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << to_json(m).dump(2) << '\n';
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read manifest " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw DataError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
}

void validate_manifest(const DatasetManifest& m, const std::filesystem::path& root) {
  std::set<std::string> ids;
  for (const auto& e : m.entries)
    if (!ids.insert(e.id).second) throw DataError("duplicate manifest id '" + e.id + "'");
  for (const auto& e : m.entries) {
    if (e.provenance == Provenance::kGenerated) {
      if (!e.parents || !e.alpha) throw DataError("generated entry '" + e.id + "' lacks its parent pair or alpha");
      for (const auto* p : {&e.parents->a, &e.parents->b})
        if (!ids.contains(*p)) throw DataError("generated entry '" + e.id + "' names unknown parent '" + *p + "'");
    }
    if (!root.empty() && !std::filesystem::exists(root / e.mesh_path))
      throw DataError("mesh file " + (root / e.mesh_path).string() + " of entry '" + e.id + "' does not exist");
  }
}

std::size_t generated_count(std::size_t originals, double ratio) {
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw ConfigError("augmentation ratio must be a non-negative number");
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(originals)));
}

DatasetManifest augment_dataset(const DatasetManifest& original, const std::vector<ManifestEntry>& generated,
                                double ratio, std::uint64_t seed) {
  const std::size_t originals = original.count(Provenance::kOriginal);
  const std::size_t need = generated_count(originals, ratio);
  if (need > generated.size())
    throw DataError("ratio " + json(ratio).dump() + " over " + std::to_string(originals) + " originals needs " +
                    std::to_string(need) + " generated shapes but only " + std::to_string(generated.size()) +
                    " are available (short by " + std::to_string(need - generated.size()) + ")");

  std::vector<std::size_t> order(generated.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, "augment"));
  rng.shuffle(order);
  order.resize(need);
  std::sort(order.begin(), order.end());

  DatasetManifest out = original;
  out.seed = seed;
  out.config["ratio"] = ratio;
  for (auto i : order) {
    if (generated[i].provenance != Provenance::kGenerated)
      throw DataError("candidate '" + generated[i].id + "' is not a generated entry");
    out.entries.push_back(generated[i]);
  }
  return out;
}

}  // namespace graspforge::augment
