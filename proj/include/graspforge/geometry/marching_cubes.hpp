#pragma once

#include "graspforge/geometry/mesh.hpp"
#include "graspforge/geometry/voxel_grid.hpp"

namespace graspforge::geometry {

inline constexpr double kDefaultIsoLevel = 0.5;

/// Iso-surface of the grid sampled at voxel centers, with cells above `iso`
/// counted as inside. The grid is padded by one empty cell on every side, so
/// the result is closed and outward oriented even for shapes touching the
/// boundary. Ambiguous faces are resolved with the asymptotic decider; a tie
/// keeps the inside corners apart. Vertices on a lattice edge are shared, so
/// every edge of the output borders exactly two triangles. An all-empty or
/// all-full grid gives an empty mesh.
TriangleMesh marching_cubes(const VoxelGrid& grid, double iso = kDefaultIsoLevel);

}  // namespace graspforge::geometry
