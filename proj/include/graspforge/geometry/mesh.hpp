#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace graspforge::geometry {

using Vec3 = Eigen::Vector3d;
using Face = std::array<std::uint32_t, 3>;

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void expand(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
};

// Triangle mesh in meters. Faces are counter-clockwise seen from outside.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  bool empty() const noexcept { return faces.empty(); }

  /// Throws DataError on out-of-range or repeated indices within a face.
  void validate() const;

  Aabb bounds() const;
  Vec3 face_normal(std::size_t f) const;  // unit, zero for zero-area faces
  double face_area(std::size_t f) const;
  double surface_area() const;
  /// Signed enclosed volume (positive for outward-oriented closed meshes).
  double signed_volume() const;
  /// Centroid of the enclosed solid; falls back to the vertex mean when the volume vanishes.
  Vec3 volume_centroid() const;

  /// Every undirected edge is used by exactly two faces.
  bool is_watertight() const;
  /// Watertight and every directed edge appears once (consistent orientation).
  bool is_consistently_oriented() const;

  void translate(const Vec3& offset);
  void scale(double factor);
};

}  // namespace graspforge::geometry
