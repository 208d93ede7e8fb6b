#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graspforge/geometry/mesh.hpp"

namespace graspforge::geometry {

enum class ToyKind { kBox, kSphere, kCylinder, kCapsule, kLPrism, kPlate };

inline constexpr int kToyKindCount = 6;

std::string toy_kind_name(ToyKind kind);

struct ToyShape {
  std::string id;  // "toy_0007_capsule"
  ToyKind kind;
  TriangleMesh mesh;  // meters, centered on the bounding box
};

/// Procedural watertight shapes with seeded random dimensions (roughly 2 to
/// 15 cm) and, optionally, a uniformly random orientation. Kinds cycle in
/// enum order, so any 6 consecutive shapes cover every kind. Shape i depends
/// only on (seed, i).
std::vector<ToyShape> make_toy_corpus(std::size_t count, std::uint64_t seed, bool random_orientation = true);

ToyShape make_toy_shape(std::size_t index, std::uint64_t seed, bool random_orientation = true);

}  // namespace graspforge::geometry
