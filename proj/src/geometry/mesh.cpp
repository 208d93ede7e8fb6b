#include "graspforge/geometry/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <string>
#include <unordered_map>

#include "graspforge/core/error.hpp"

namespace graspforge::geometry {
namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; }

}  // namespace

void TriangleMesh::validate() const {
  const auto n = vertices.size();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    for (auto i : t)
      if (i >= n)
        throw DataError("face " + std::to_string(f) + " references vertex " + std::to_string(i) + " of " +
                        std::to_string(n));
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw DataError("face " + std::to_string(f) + " is degenerate (repeated vertex index)");
  }
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.expand(v);
  return box;
}

Vec3 TriangleMesh::face_normal(std::size_t f) const {
  const Face& t = faces[f];
  const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double TriangleMesh::face_area(std::size_t f) const {
  const Face& t = faces[f];
  return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
}

double TriangleMesh::surface_area() const {
  double a = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) a += face_area(f);
  return a;
}

double TriangleMesh::signed_volume() const {
  double v = 0.0;
  for (const Face& t : faces) v += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]]));
  return v / 6.0;
}

Vec3 TriangleMesh::volume_centroid() const {
  double vol = 0.0;
  Vec3 c = Vec3::Zero();
  for (const Face& t : faces) {
    const double v = vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]])) / 6.0;
    vol += v;
    c += v * (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 4.0;
  }
  if (std::abs(vol) > 1e-18) return c / vol;
  Vec3 mean = Vec3::Zero();
  for (const auto& p : vertices) mean += p;
  return vertices.empty() ? mean : Vec3(mean / static_cast<double>(vertices.size()));
}

bool TriangleMesh::is_watertight() const {
  if (faces.empty()) return false;
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(faces.size() * 3);
  for (const Face& t : faces)
    for (int e = 0; e < 3; ++e) {
      const auto a = t[e], b = t[(e + 1) % 3];
      ++count[edge_key(std::min(a, b), std::max(a, b))];
    }
  return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 2; });
}

bool TriangleMesh::is_consistently_oriented() const {
  if (!is_watertight()) return false;
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(faces.size() * 3);
  for (const Face& t : faces)
    for (int e = 0; e < 3; ++e)
      if (++directed[edge_key(t[e], t[(e + 1) % 3])] > 1) return false;
  return true;
}

void TriangleMesh::translate(const Vec3& offset) {
  for (auto& v : vertices) v += offset;
}

void TriangleMesh::scale(double factor) {
  for (auto& v : vertices) v *= factor;
}

}  // namespace graspforge::geometry
