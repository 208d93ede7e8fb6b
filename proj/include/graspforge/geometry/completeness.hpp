#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "graspforge/geometry/voxel_grid.hpp"

namespace graspforge::geometry {

struct DbscanParams {
  double radius = 1.8;         // in voxel units
  std::size_t min_points = 4;  // neighborhood size, the point itself included
};

using LatticePoint = std::array<int, 3>;

inline constexpr int kNoise = -1;

/// DBSCAN over integer lattice points with Euclidean distance. Returns one
/// label per point: a cluster id numbered from 0 in discovery order, or
/// kNoise. Points are visited in input order, so border points shared by two
/// clusters join the one found first.
std::vector<int> dbscan(const std::vector<LatticePoint>& points, const DbscanParams& params = {});

struct CompletenessReport {
  std::size_t cluster_count = 0;
  std::size_t major_cluster_size = 0;
  std::size_t occupied = 0;
  double outlier_percentage = 0.0;  // 100 * (occupied - major) / occupied
};

/// Clusters occupied cells (value >= 0.5) by DBSCAN over their centers; every
/// cell outside the largest cluster, noise included, counts as an outlier.
/// Throws DataError when no cell is occupied.
CompletenessReport completeness(const VoxelGrid& grid, const DbscanParams& params = {});

}  // namespace graspforge::geometry
