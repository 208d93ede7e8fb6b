#include "graspforge/grasp/graspness.hpp"

#include <algorithm>
#include <string>

#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"
#include "graspforge/grasp/antipodal.hpp"

namespace graspforge::grasp {
namespace {

Contact perturb(const Contact& c, const GraspScene& scene, double noise, Rng& rng) {
  if (noise == 0.0) return c;
  const Vec3 moved = c.point + noise * Vec3(rng.normal(), rng.normal(), rng.normal());
  const auto hit = scene.bvh.closest_point(moved);
  return {hit.point, scene.bvh.mesh().face_normal(hit.face)};
}

}  // namespace

GraspScene::GraspScene(const geometry::TriangleMesh& mesh, const GraspConfig& config)
    : bvh(mesh), centroid(mesh.volume_centroid()), torque_scale(0.0) {
  torque_scale = config.torque_scale ? *config.torque_scale : max_surface_distance(mesh, centroid);
  if (!(torque_scale > 0.0)) throw DataError("grasp scene: degenerate mesh (zero torque scale)");
}

double robust_quality(const GraspCandidate& grasp, const GraspScene& scene, const GraspConfig& config,
                      std::uint64_t seed, std::vector<double>* trials) {
  config.validate();
  Rng rng(seed);
  if (trials) trials->clear();
  double first = 0.0, spread = 0.0;
  for (std::size_t t = 0; t < config.robustness_trials; ++t) {
    GraspCandidate g = grasp;
    g.first = perturb(grasp.first, scene, config.position_noise, rng);
    g.second = perturb(grasp.second, scene, config.position_noise, rng);
    ContactModel model = contact_model(config, scene.torque_scale);
    if (config.friction_noise > 0.0) model.friction = std::max(0.0, config.friction + rng.normal(0.0, config.friction_noise));
    const double q = ferrari_canny(g, scene.centroid, model);
    if (trials) trials->push_back(q);
    // Accumulate offsets from the first trial so identical trials average exactly.
    if (t == 0)
      first = q;
    else
      spread += q - first;
  }
  return first + spread / static_cast<double>(config.robustness_trials);
}

GraspnessResult evaluate_graspness(const geometry::TriangleMesh& mesh, const GraspConfig& config,
                                   std::uint64_t seed) {
  config.validate();
  const GraspScene scene(mesh, config);
  GraspnessResult r;
  r.torque_scale = scene.torque_scale;
  r.candidates = sample_antipodal_grasps(scene.bvh, config, seed);
  const ContactModel model = contact_model(config, scene.torque_scale);
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    auto& g = r.candidates[i];
    g.quality = ferrari_canny(g, scene.centroid, model);
    g.robust_quality = robust_quality(g, scene, config, derive_seed(seed, "robust/" + std::to_string(i)));
    if (g.robust_quality >= config.quality_threshold) ++r.successes;
  }
  if (!r.candidates.empty())
    r.graspness = static_cast<double>(r.successes) / static_cast<double>(r.candidates.size());
  return r;
}

double graspness(const geometry::TriangleMesh& mesh, const GraspConfig& config, std::uint64_t seed) {
  return evaluate_graspness(mesh, config, seed).graspness;
}

}  // namespace graspforge::grasp
