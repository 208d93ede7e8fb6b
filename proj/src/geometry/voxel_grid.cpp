#include "graspforge/geometry/voxel_grid.hpp"

#include <string>

#include "graspforge/core/binary_io.hpp"
#include "graspforge/core/error.hpp"

namespace graspforge::geometry {
namespace {

constexpr std::uint32_t kVoxelVersion = 1;

void check_geometry(std::uint32_t resolution, double voxel_size) {
  if (resolution == 0) throw DataError("voxel grid resolution must be positive");
  if (!(voxel_size > 0.0)) throw DataError("voxel size must be positive");
}

}  // namespace

VoxelGrid::VoxelGrid(std::uint32_t resolution, const Vec3& origin, double voxel_size)
    : resolution_(resolution), origin_(origin), voxel_size_(voxel_size) {
  check_geometry(resolution, voxel_size);
  values_.assign(std::size_t{resolution} * resolution * resolution, 0.0);
}

VoxelGrid::VoxelGrid(std::uint32_t resolution, const Vec3& origin, double voxel_size, std::vector<double> values)
    : resolution_(resolution), origin_(origin), voxel_size_(voxel_size), values_(std::move(values)) {
  check_geometry(resolution, voxel_size);
  if (values_.size() != std::size_t{resolution} * resolution * resolution)
    throw DimensionError("voxel grid of resolution " + std::to_string(resolution) + " needs " +
                         std::to_string(std::size_t{resolution} * resolution * resolution) + " values, got " +
                         std::to_string(values_.size()));
}

bool VoxelGrid::is_binary() const {
  for (double v : values_)
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

std::size_t VoxelGrid::occupied_count(double iso) const {
  std::size_t n = 0;
  for (double v : values_) n += v >= iso;
  return n;
}

VoxelGrid VoxelGrid::thresholded(double iso) const {
  VoxelGrid out = *this;
  for (double& v : out.values_) v = v >= iso ? 1.0 : 0.0;
  return out;
}

double voxel_iou(const VoxelGrid& a, const VoxelGrid& b, double iso) {
  if (a.resolution() != b.resolution())
    throw DimensionError("IoU of grids with resolutions " + std::to_string(a.resolution()) + " and " +
                         std::to_string(b.resolution()));
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool oa = a.values()[i] >= iso, ob = b.values()[i] >= iso;
    inter += oa && ob;
    uni += oa || ob;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::uint8_t> serialize_voxels(const VoxelGrid& grid) {
  if (!grid.is_binary()) throw DataError("only binary voxel grids can be written; threshold first");
  ByteWriter w;
  w.bytes("GFVX");
  w.u32(kVoxelVersion);
  w.u32(grid.resolution());
  for (int a = 0; a < 3; ++a) w.f64(grid.origin()[a]);
  w.f64(grid.voxel_size());
  const auto& v = grid.values();
  for (std::size_t i = 0; i < v.size(); i += 8) {
    std::uint8_t byte = 0;
    for (std::size_t b = 0; b < 8 && i + b < v.size(); ++b)
      if (v[i + b] != 0.0) byte |= static_cast<std::uint8_t>(1u << b);
    w.u8(byte);
  }
  return std::move(w.buffer());
}

VoxelGrid deserialize_voxels(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  if (r.bytes(4) != "GFVX") throw ParseError("not a voxel grid file (bad magic)");
  const auto version = r.u32();
  if (version != kVoxelVersion) throw ParseError("unsupported voxel grid version " + std::to_string(version));
  const auto resolution = r.u32();
  Vec3 origin;
  for (int a = 0; a < 3; ++a) origin[a] = r.f64();
  const double voxel_size = r.f64();
  if (resolution == 0 || resolution > 1024) throw ParseError("implausible voxel resolution " + std::to_string(resolution));
  const std::size_t n = std::size_t{resolution} * resolution * resolution;
  if (r.remaining() != (n + 7) / 8)
    throw ParseError("voxel payload has " + std::to_string(r.remaining()) + " bytes, expected " +
                     std::to_string((n + 7) / 8));
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; i += 8) {
    const std::uint8_t byte = r.u8();
    for (std::size_t b = 0; b < 8 && i + b < n; ++b) values[i + b] = (byte >> b) & 1u ? 1.0 : 0.0;
  }
  return VoxelGrid(resolution, origin, voxel_size, std::move(values));
}

void save_voxels(const VoxelGrid& grid, const std::filesystem::path& path) {
  write_file_bytes(path.string(), serialize_voxels(grid));
}

VoxelGrid load_voxels(const std::filesystem::path& path) { return deserialize_voxels(read_file_bytes(path.string())); }

}  // namespace graspforge::geometry
