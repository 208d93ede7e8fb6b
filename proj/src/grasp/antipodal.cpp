#include "graspforge/grasp/antipodal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"

namespace graspforge::grasp {

using geometry::MeshBvh;
using geometry::TriangleMesh;

std::vector<GraspCandidate> sample_antipodal_grasps(const MeshBvh& bvh, const GraspConfig& config,
                                                    std::uint64_t seed) {
  config.validate();
  const TriangleMesh& mesh = bvh.mesh();
  if (mesh.empty()) throw DataError("sample_antipodal_grasps: empty mesh");
  if (!mesh.is_watertight()) throw DataError("sample_antipodal_grasps: mesh is not watertight");

  std::vector<double> cdf(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += mesh.face_area(f);
    cdf[f] = total;
  }
  if (!(total > 0.0)) throw DataError("sample_antipodal_grasps: mesh has no area");

  const double reach = mesh.bounds().extent().norm() + 1e-6;
  const double cos_limit = 1.0 / std::sqrt(1.0 + config.friction * config.friction);
  const std::size_t attempts = config.samples_per_object * config.attempts_per_sample;

  Rng rng(derive_seed(seed, "antipodal"));
  std::vector<GraspCandidate> out;
  for (std::size_t a = 0; a < attempts && out.size() < config.samples_per_object; ++a) {
    const double pick = rng.uniform() * total;
    const auto f = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const auto& face = mesh.faces[f];
    const geometry::Vec3 p = (1.0 - r1) * mesh.vertices[face[0]] + r1 * (1.0 - r2) * mesh.vertices[face[1]] +
                             r1 * r2 * mesh.vertices[face[2]];
    const geometry::Vec3 n = mesh.face_normal(f);
    const geometry::Vec3 in = -n;

    // Uniform direction on the spherical cap of the friction cone.
    const double cos_t = 1.0 - rng.uniform() * (1.0 - cos_limit);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    geometry::Vec3 t1 = std::abs(in.x()) < 0.9 ? geometry::Vec3::UnitX() : geometry::Vec3::UnitY();
    t1 = (t1 - t1.dot(in) * in).normalized();
    const geometry::Vec3 t2 = in.cross(t1);
    const geometry::Vec3 d = (cos_t * in + sin_t * (std::cos(phi) * t1 + std::sin(phi) * t2)).normalized();

    const geometry::Vec3 origin = p - reach * d;
    const auto hits = bvh.intersect_line(origin, d, 0.0, 2.0 * reach);
    if (hits.size() < 2) continue;
    GraspCandidate g;
    g.first = {origin + hits.front().t * d, mesh.face_normal(hits.front().face)};
    g.second = {origin + hits.back().t * d, mesh.face_normal(hits.back().face)};
    g.width = (g.second.point - g.first.point).norm();
    if (!(g.width > 0.0) || g.width > config.gripper_max_width) continue;
    g.axis = (g.second.point - g.first.point) / g.width;
    if (!is_antipodal(g, config.friction)) continue;
    out.push_back(g);
  }
  return out;
}

std::vector<GraspCandidate> sample_antipodal_grasps(const TriangleMesh& mesh, const GraspConfig& config,
                                                    std::uint64_t seed) {
  return sample_antipodal_grasps(MeshBvh(mesh), config, seed);
}

}  // namespace graspforge::grasp
