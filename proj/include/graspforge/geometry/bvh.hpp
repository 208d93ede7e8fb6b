#pragma once

#include <cstdint>
#include <vector>

#include "graspforge/geometry/mesh.hpp"

namespace graspforge::geometry {

struct RayHit {
  double t;
  std::uint32_t face;
};

struct SurfacePoint {
  Vec3 point;
  std::uint32_t face;
  double distance;
};

// Axis-aligned bounding volume hierarchy over a mesh's triangles. Holds its
// own copy of the geometry, so it stays valid independently of the source.
class MeshBvh {
 public:
  explicit MeshBvh(const TriangleMesh& mesh);

  const TriangleMesh& mesh() const noexcept { return mesh_; }

  /// All intersections of origin + t * dir with t in [t_min, t_max], sorted by t.
  std::vector<RayHit> intersect_line(const Vec3& origin, const Vec3& dir, double t_min, double t_max) const;

  /// Closest surface point to p. The mesh must be non-empty.
  SurfacePoint closest_point(const Vec3& p) const;

  /// Inside test by ray parity, majority-voted over three skewed directions.
  bool contains(const Vec3& p) const;

 private:
  struct Node {
    Aabb box;
    std::uint32_t left = 0;   // child index, or first triangle for leaves
    std::uint32_t right = 0;  // child index, or triangle count for leaves
    bool leaf = false;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);
  Aabb face_box(std::uint32_t f) const;

  TriangleMesh mesh_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace graspforge::geometry
