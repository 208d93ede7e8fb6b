#include "graspforge/geometry/voxelize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "graspforge/core/error.hpp"
#include "graspforge/geometry/bvh.hpp"

namespace graspforge::geometry {
namespace {

bool separated_on(const Vec3& axis, const Vec3& half, const Vec3& a, const Vec3& b, const Vec3& c) {
  if (axis.squaredNorm() < 1e-30) return false;
  const double pa = axis.dot(a), pb = axis.dot(b), pc = axis.dot(c);
  const double r = half.x() * std::abs(axis.x()) + half.y() * std::abs(axis.y()) + half.z() * std::abs(axis.z());
  return std::min({pa, pb, pc}) > r || std::max({pa, pb, pc}) < -r;
}

}  // namespace

bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a0, const Vec3& b0, const Vec3& c0) {
  const Vec3 a = a0 - center, b = b0 - center, c = c0 - center;
  for (int k = 0; k < 3; ++k) {
    if (std::min({a[k], b[k], c[k]}) > half[k] || std::max({a[k], b[k], c[k]}) < -half[k]) return false;
  }
  const Vec3 e[3] = {b - a, c - b, a - c};
  if (separated_on(e[0].cross(e[1]), half, a, b, c)) return false;
  for (const Vec3& edge : e)
    for (int k = 0; k < 3; ++k)
      if (separated_on(edge.cross(Vec3::Unit(k)), half, a, b, c)) return false;
  return true;
}

VoxelizeResult voxelize(const TriangleMesh& mesh, std::uint32_t resolution, double fill_fraction) {
  if (mesh.empty()) throw DataError("cannot voxelize an empty mesh");
  if (resolution == 0) throw DataError("voxel resolution must be positive");
  if (!(fill_fraction > 0.0 && fill_fraction <= 1.0)) throw DataError("fill fraction must lie in (0, 1]");
  const Aabb box = mesh.bounds();
  const double extent = box.extent().maxCoeff();
  if (!(extent > 0.0)) throw DataError("cannot voxelize a mesh with zero extent");
  const double voxel_size = extent / (fill_fraction * resolution);
  const Vec3 origin = box.center() - Vec3::Constant(0.5 * resolution * voxel_size);
  return voxelize_into(mesh, resolution, origin, voxel_size);
}

VoxelizeResult voxelize_into(const TriangleMesh& mesh, std::uint32_t resolution, const Vec3& origin,
                             double voxel_size) {
  if (mesh.empty()) throw DataError("cannot voxelize an empty mesh");
  mesh.validate();
  VoxelizeResult result{VoxelGrid(resolution, origin, voxel_size), true, {}};
  VoxelGrid& grid = result.grid;
  const long r = resolution;
  const Vec3 half = Vec3::Constant(0.5 * voxel_size);

  std::vector<char> surface(grid.size(), 0);
  for (const Face& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    long lo[3], hi[3];
    bool outside = false;
    for (int k = 0; k < 3; ++k) {
      const double mn = (std::min({a[k], b[k], c[k]}) - origin[k]) / voxel_size;
      const double mx = (std::max({a[k], b[k], c[k]}) - origin[k]) / voxel_size;
      lo[k] = std::max(0L, static_cast<long>(std::floor(mn)) - 1);
      hi[k] = std::min(r - 1, static_cast<long>(std::floor(mx)) + 1);
      if (lo[k] > hi[k]) outside = true;
    }
    if (outside) continue;
    for (long z = lo[2]; z <= hi[2]; ++z)
      for (long y = lo[1]; y <= hi[1]; ++y)
        for (long x = lo[0]; x <= hi[0]; ++x) {
          const auto ux = static_cast<std::uint32_t>(x), uy = static_cast<std::uint32_t>(y),
                     uz = static_cast<std::uint32_t>(z);
          const std::size_t i = grid.index(ux, uy, uz);
          if (!surface[i] && triangle_box_overlap(grid.center(ux, uy, uz), half, a, b, c)) surface[i] = 1;
        }
  }

  if (!mesh.is_watertight()) {
    result.solid = false;
    result.warning = "mesh is not watertight; only surface voxels were marked";
    for (std::size_t i = 0; i < grid.size(); ++i) grid.values()[i] = surface[i];
    return result;
  }

  // Cells untouched by any triangle form 6-connected regions that lie wholly
  // inside or wholly outside the solid. Regions touching the grid boundary
  // are outside; every other region is classified by one representative.
  // Surface cells are kept when their center is inside.
  const MeshBvh bvh(mesh);
  std::vector<int> region(grid.size(), -1);
  std::deque<std::size_t> queue;
  const std::size_t rr = resolution;
  const std::size_t stride[3] = {1, rr, rr * rr};
  int regions = 0;
  for (std::size_t seed = 0; seed < grid.size(); ++seed) {
    if (surface[seed] || region[seed] >= 0) continue;
    const int id = regions++;
    bool touches_boundary = false;
    region[seed] = id;
    queue.push_back(seed);
    std::vector<std::size_t> members;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      members.push_back(i);
      const std::size_t coord[3] = {i % rr, (i / rr) % rr, i / (rr * rr)};
      for (int k = 0; k < 3; ++k) {
        if (coord[k] == 0 || coord[k] + 1 == rr) touches_boundary = true;
        if (coord[k] > 0) {
          const std::size_t j = i - stride[k];
          if (!surface[j] && region[j] < 0) {
            region[j] = id;
            queue.push_back(j);
          }
        }
        if (coord[k] + 1 < rr) {
          const std::size_t j = i + stride[k];
          if (!surface[j] && region[j] < 0) {
            region[j] = id;
            queue.push_back(j);
          }
        }
      }
    }
    bool inside = false;
    if (!touches_boundary) {
      const std::size_t i = members.front();
      inside = bvh.contains(grid.center(static_cast<std::uint32_t>(i % rr), static_cast<std::uint32_t>((i / rr) % rr),
                                        static_cast<std::uint32_t>(i / (rr * rr))));
    }
    if (inside)
      for (std::size_t i : members) grid.values()[i] = 1.0;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!surface[i]) continue;
    const Vec3 p = grid.center(static_cast<std::uint32_t>(i % rr), static_cast<std::uint32_t>((i / rr) % rr),
                               static_cast<std::uint32_t>(i / (rr * rr)));
    if (bvh.contains(p)) grid.values()[i] = 1.0;
  }
  return result;
}

}  // namespace graspforge::geometry
