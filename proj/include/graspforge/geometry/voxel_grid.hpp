#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "graspforge/geometry/mesh.hpp"

namespace graspforge::geometry {

// Cubic occupancy lattice. Cell (x, y, z) covers
// [origin + (x, y, z) * voxel_size, origin + (x + 1, y + 1, z + 1) * voxel_size)
// and values are stored x-fastest: index = x + R * (y + R * z).
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(std::uint32_t resolution, const Vec3& origin, double voxel_size);
  VoxelGrid(std::uint32_t resolution, const Vec3& origin, double voxel_size, std::vector<double> values);

  std::uint32_t resolution() const noexcept { return resolution_; }
  const Vec3& origin() const noexcept { return origin_; }
  double voxel_size() const noexcept { return voxel_size_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t z) const noexcept {
    return x + std::size_t{resolution_} * (y + std::size_t{resolution_} * z);
  }
  double at(std::uint32_t x, std::uint32_t y, std::uint32_t z) const { return values_[index(x, y, z)]; }
  void set(std::uint32_t x, std::uint32_t y, std::uint32_t z, double v) { values_[index(x, y, z)] = v; }

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  Vec3 center(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
    return origin_ + (Vec3(x, y, z) + Vec3::Constant(0.5)) * voxel_size_;
  }

  bool is_binary() const;
  /// Cells with value >= iso.
  std::size_t occupied_count(double iso = 0.5) const;
  /// Copy with every value replaced by 1 if >= iso, else 0.
  VoxelGrid thresholded(double iso = 0.5) const;

  bool operator==(const VoxelGrid&) const = default;

 private:
  std::uint32_t resolution_ = 0;
  Vec3 origin_ = Vec3::Zero();
  double voxel_size_ = 1.0;
  std::vector<double> values_;
};

/// Intersection over union of the occupied sets (value >= iso). Two empty grids give 1.
double voxel_iou(const VoxelGrid& a, const VoxelGrid& b, double iso = 0.5);

// Binary file: "GFVX", u32 version, u32 resolution, 3 x f64 origin, f64 voxel
// size, then occupancy bits x-fastest, least significant bit first.
std::vector<std::uint8_t> serialize_voxels(const VoxelGrid& grid);
VoxelGrid deserialize_voxels(const std::vector<std::uint8_t>& bytes);
void save_voxels(const VoxelGrid& grid, const std::filesystem::path& path);
VoxelGrid load_voxels(const std::filesystem::path& path);

}  // namespace graspforge::geometry
