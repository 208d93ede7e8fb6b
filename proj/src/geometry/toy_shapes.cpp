#include "graspforge/geometry/toy_shapes.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cstdio>

#include "graspforge/core/rng.hpp"
#include "graspforge/geometry/primitives.hpp"

namespace graspforge::geometry {

std::string toy_kind_name(ToyKind kind) {
  switch (kind) {
    case ToyKind::kBox:
      return "box";
    case ToyKind::kSphere:
      return "sphere";
    case ToyKind::kCylinder:
      return "cylinder";
    case ToyKind::kCapsule:
      return "capsule";
    case ToyKind::kLPrism:
      return "lprism";
    case ToyKind::kPlate:
      return "plate";
  }
  return "unknown";
}

ToyShape make_toy_shape(std::size_t index, std::uint64_t seed, bool random_orientation) {
  Rng rng(derive_seed(seed, "toy/" + std::to_string(index)));
  const auto kind = static_cast<ToyKind>(index % kToyKindCount);
  TriangleMesh mesh;
  switch (kind) {
    case ToyKind::kBox:
      mesh = make_box(Vec3(rng.uniform(0.02, 0.10), rng.uniform(0.02, 0.10), rng.uniform(0.02, 0.10)));
      break;
    case ToyKind::kSphere:
      mesh = make_uv_sphere(rng.uniform(0.015, 0.06), 32, 16);
      break;
    case ToyKind::kCylinder:
      mesh = make_cylinder(rng.uniform(0.01, 0.05), rng.uniform(0.03, 0.15), 32);
      break;
    case ToyKind::kCapsule:
      mesh = make_capsule(rng.uniform(0.01, 0.04), rng.uniform(0.02, 0.10), 32, 8);
      break;
    case ToyKind::kLPrism: {
      const double lx = rng.uniform(0.04, 0.12), ly = rng.uniform(0.04, 0.12);
      const double arm = rng.uniform(0.2, 0.45) * std::min(lx, ly);
      mesh = make_l_prism(lx, ly, arm, rng.uniform(0.02, 0.08));
      break;
    }
    case ToyKind::kPlate: {
      const double a = rng.uniform(0.05, 0.12), b = rng.uniform(0.05, 0.12);
      mesh = make_box(Vec3(a, b, rng.uniform(0.1, 0.2) * std::max(a, b)));
      break;
    }
  }
  if (random_orientation) {
    // Normalized Gaussian 4-vector: a uniformly distributed rotation.
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    const Eigen::Matrix3d r = q.toRotationMatrix();
    for (auto& v : mesh.vertices) v = r * v;
    mesh.translate(-mesh.bounds().center());
  }
  char id[64];
  std::snprintf(id, sizeof id, "toy_%04zu_%s", index, toy_kind_name(kind).c_str());
  return {id, kind, std::move(mesh)};
}

std::vector<ToyShape> make_toy_corpus(std::size_t count, std::uint64_t seed, bool random_orientation) {
  std::vector<ToyShape> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(make_toy_shape(i, seed, random_orientation));
  return out;
}

}  // namespace graspforge::geometry
