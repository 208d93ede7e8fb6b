#pragma once

#include <cstdint>
#include <string>

#include "graspforge/geometry/mesh.hpp"
#include "graspforge/geometry/voxel_grid.hpp"

namespace graspforge::geometry {

struct VoxelizeResult {
  VoxelGrid grid;
  /// False when the mesh was not watertight and only surface cells were marked.
  bool solid = true;
  std::string warning;
};

/// Default share of the grid extent covered by the mesh's largest bounding-box side.
inline constexpr double kDefaultFillFraction = 0.9;

/// Binary voxelization with the mesh scaled and centered so its largest
/// bounding-box extent spans `fill_fraction` of the grid. Throws DataError on
/// an empty mesh.
VoxelizeResult voxelize(const TriangleMesh& mesh, std::uint32_t resolution,
                        double fill_fraction = kDefaultFillFraction);

/// Binary voxelization into a caller-chosen lattice.
VoxelizeResult voxelize_into(const TriangleMesh& mesh, std::uint32_t resolution, const Vec3& origin,
                             double voxel_size);

/// Separating-axis overlap test between a triangle and a closed axis-aligned box.
bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace graspforge::geometry
