#include "graspforge/geometry/marching_cubes.hpp"

#include <array>
#include <string>

#include "graspforge/core/error.hpp"

namespace graspforge::geometry {
namespace {

using Corner = std::array<int, 3>;

// Cube faces, corners listed counter-clockwise about the outward face normal.
constexpr std::array<std::array<Corner, 4>, 6> kFaces = {{
    {{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 1, 0}}},
    {{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 0, 1}}},
    {{{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}}},
    {{{0, 1, 0}, {0, 1, 1}, {1, 1, 1}, {1, 1, 0}}},
    {{{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}}},
    {{{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}},
}};

class Extractor {
 public:
  Extractor(const VoxelGrid& grid, double iso) : grid_(grid), iso_(iso), p_(grid.resolution() + 2) {
    edge_vertex_.assign(p_ * p_ * p_ * 3, -1);
  }

  TriangleMesh run() {
    const std::size_t cubes = p_ - 1;
    for (std::size_t z = 0; z < cubes; ++z)
      for (std::size_t y = 0; y < cubes; ++y)
        for (std::size_t x = 0; x < cubes; ++x) cube(x, y, z);
    return std::move(mesh_);
  }

 private:
  double value(std::size_t x, std::size_t y, std::size_t z) const {
    const std::size_t r = grid_.resolution();
    if (x == 0 || y == 0 || z == 0 || x > r || y > r || z > r) return 0.0;
    return grid_.at(static_cast<std::uint32_t>(x - 1), static_cast<std::uint32_t>(y - 1),
                    static_cast<std::uint32_t>(z - 1));
  }

  Vec3 position(double x, double y, double z) const {
    return grid_.origin() + (Vec3(x, y, z) - Vec3::Constant(0.5)) * grid_.voxel_size();
  }

  // Vertex on the lattice edge between two adjacent points.
  std::uint32_t edge_vertex(const Corner& a, const Corner& b) {
    int axis = 0;
    while (a[axis] == b[axis]) ++axis;
    const Corner& lo = a[axis] < b[axis] ? a : b;
    const Corner& hi = a[axis] < b[axis] ? b : a;
    const std::size_t key =
        (static_cast<std::size_t>(lo[0]) + p_ * (static_cast<std::size_t>(lo[1]) + p_ * static_cast<std::size_t>(lo[2]))) * 3 +
        static_cast<std::size_t>(axis);
    if (edge_vertex_[key] >= 0) return static_cast<std::uint32_t>(edge_vertex_[key]);
    const double v0 = value(lo[0], lo[1], lo[2]);
    const double v1 = value(hi[0], hi[1], hi[2]);
    const double t = (iso_ - v0) / (v1 - v0);
    Vec3 p(lo[0], lo[1], lo[2]);
    p[axis] += t;
    const auto id = static_cast<std::uint32_t>(mesh_.vertices.size());
    mesh_.vertices.push_back(position(p.x(), p.y(), p.z()));
    edge_vertex_[key] = static_cast<std::int64_t>(id);
    return id;
  }

  void cube(std::size_t x, std::size_t y, std::size_t z) {
    double v[2][2][2];
    bool any_in = false, any_out = false;
    for (int dz = 0; dz < 2; ++dz)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          v[dx][dy][dz] = value(x + dx, y + dy, z + dz);
          (v[dx][dy][dz] > iso_ ? any_in : any_out) = true;
        }
    if (!any_in || !any_out) return;

    // Directed iso-segments on the cube faces, as (from, to) vertex ids.
    std::array<std::uint32_t, 24> from{}, to{};
    int segments = 0;
    for (const auto& face : kFaces) {
      Corner c[4];
      double fv[4];
      bool in[4];
      for (int k = 0; k < 4; ++k) {
        c[k] = {static_cast<int>(x) + face[k][0], static_cast<int>(y) + face[k][1],
                static_cast<int>(z) + face[k][2]};
        fv[k] = v[face[k][0]][face[k][1]][face[k][2]];
        in[k] = fv[k] > iso_;
      }
      int crossings = 0;
      for (int k = 0; k < 4; ++k) crossings += in[k] != in[(k + 1) % 4];
      if (crossings == 0) continue;
      auto edge = [&](int k) { return edge_vertex(c[k], c[(k + 1) % 4]); };
      if (crossings == 2) {
        int enter = -1, leave = -1;
        for (int k = 0; k < 4; ++k) {
          if (!in[k] && in[(k + 1) % 4]) enter = k;
          if (in[k] && !in[(k + 1) % 4]) leave = k;
        }
        from[segments] = edge(enter);
        to[segments] = edge(leave);
        ++segments;
        continue;
      }
      // Saddle of the bilinear interpolant decides whether the inside corners connect.
      const double saddle = (fv[0] * fv[2] - fv[1] * fv[3]) / (fv[0] + fv[2] - fv[1] - fv[3]);
      const bool join_inside = saddle > iso_;
      for (int k = 0; k < 4; ++k) {
        const int prev = (k + 3) % 4;
        if (in[k] && !join_inside) {
          from[segments] = edge(prev);
          to[segments] = edge(k);
          ++segments;
        } else if (!in[k] && join_inside) {
          from[segments] = edge(k);
          to[segments] = edge(prev);
          ++segments;
        }
      }
    }

    std::array<bool, 24> used{};
    for (int s = 0; s < segments; ++s) {
      if (used[s]) continue;
      std::vector<std::uint32_t> loop;
      int cur = s;
      while (!used[cur]) {
        used[cur] = true;
        loop.push_back(from[cur]);
        int next = -1;
        for (int t = 0; t < segments; ++t)
          if (!used[t] && from[t] == to[cur]) {
            next = t;
            break;
          }
        if (next < 0) {
          if (to[cur] != loop.front()) throw Error("marching cubes produced an open contour");
          break;
        }
        cur = next;
      }
      emit(loop);
    }
  }

  void emit(const std::vector<std::uint32_t>& loop) {
    if (loop.size() < 3) throw Error("marching cubes produced a contour with fewer than three vertices");
    if (loop.size() == 3) {
      mesh_.faces.push_back({loop[0], loop[1], loop[2]});
      return;
    }
    Vec3 centroid = Vec3::Zero();
    for (auto id : loop) centroid += mesh_.vertices[id];
    centroid /= static_cast<double>(loop.size());
    const auto c = static_cast<std::uint32_t>(mesh_.vertices.size());
    mesh_.vertices.push_back(centroid);
    for (std::size_t k = 0; k < loop.size(); ++k) mesh_.faces.push_back({loop[k], loop[(k + 1) % loop.size()], c});
  }

  const VoxelGrid& grid_;
  double iso_;
  std::size_t p_;
  std::vector<std::int64_t> edge_vertex_;
  TriangleMesh mesh_;
};

}  // namespace

TriangleMesh marching_cubes(const VoxelGrid& grid, double iso) {
  if (grid.resolution() < 2) throw DataError("marching cubes needs a grid resolution of at least 2");
  if (!(iso > 0.0 && iso < 1.0)) throw DataError("iso level must lie strictly between 0 and 1");
  bool any_out = false;
  for (double v : grid.values()) any_out = any_out || !(v > iso);
  if (!any_out) return {};
  return Extractor(grid, iso).run();
}

}  // namespace graspforge::geometry
