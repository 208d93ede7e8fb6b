#include "graspforge/geometry/primitives.hpp"

#include <cmath>
#include <numbers>

#include "graspforge/core/error.hpp"

namespace graspforge::geometry {

TriangleMesh make_lathe(const std::vector<std::pair<double, double>>& profile, double top_z, double bottom_z,
                        int slices) {
  if (profile.empty() || slices < 3) throw DataError("lathe needs a profile and at least three slices");
  TriangleMesh m;
  const auto s = static_cast<std::uint32_t>(slices);
  m.vertices.emplace_back(0.0, 0.0, top_z);
  for (const auto& [z, r] : profile)
    for (std::uint32_t j = 0; j < s; ++j) {
      const double th = 2.0 * std::numbers::pi * j / slices;
      m.vertices.emplace_back(r * std::cos(th), r * std::sin(th), z);
    }
  const auto bottom = static_cast<std::uint32_t>(m.vertices.size());
  m.vertices.emplace_back(0.0, 0.0, bottom_z);
  auto ring = [&](std::size_t k, std::uint32_t j) { return static_cast<std::uint32_t>(1 + k * s + j % s); };
  for (std::uint32_t j = 0; j < s; ++j) m.faces.push_back({0, ring(0, j), ring(0, j + 1)});
  for (std::size_t k = 0; k + 1 < profile.size(); ++k)
    for (std::uint32_t j = 0; j < s; ++j) {
      m.faces.push_back({ring(k, j), ring(k + 1, j), ring(k + 1, j + 1)});
      m.faces.push_back({ring(k, j), ring(k + 1, j + 1), ring(k, j + 1)});
    }
  const std::size_t last = profile.size() - 1;
  for (std::uint32_t j = 0; j < s; ++j) m.faces.push_back({bottom, ring(last, j + 1), ring(last, j)});
  return m;
}

TriangleMesh make_uv_sphere(double radius, int slices, int stacks) {
  if (!(radius > 0.0) || stacks < 2) throw DataError("sphere needs a positive radius and at least two stacks");
  std::vector<std::pair<double, double>> profile;
  for (int k = 1; k < stacks; ++k) {
    const double phi = std::numbers::pi * k / stacks;
    profile.emplace_back(radius * std::cos(phi), radius * std::sin(phi));
  }
  return make_lathe(profile, radius, -radius, slices);
}

TriangleMesh make_cylinder(double radius, double height, int slices) {
  if (!(radius > 0.0 && height > 0.0)) throw DataError("cylinder dimensions must be positive");
  return make_lathe({{0.5 * height, radius}, {-0.5 * height, radius}}, 0.5 * height, -0.5 * height, slices);
}

TriangleMesh make_capsule(double radius, double length, int slices, int cap_stacks) {
  if (!(radius > 0.0 && length >= 0.0) || cap_stacks < 1) throw DataError("capsule dimensions must be positive");
  const double h = 0.5 * length;
  std::vector<std::pair<double, double>> profile;
  for (int k = 1; k <= cap_stacks; ++k) {
    const double phi = 0.5 * std::numbers::pi * k / cap_stacks;
    profile.emplace_back(h + radius * std::cos(phi), radius * std::sin(phi));
  }
  for (int k = cap_stacks; k >= 1; --k) {
    const double phi = 0.5 * std::numbers::pi * k / cap_stacks;
    profile.emplace_back(-h - radius * std::cos(phi), radius * std::sin(phi));
  }
  if (length == 0.0) profile.erase(profile.begin() + cap_stacks);
  return make_lathe(profile, h + radius, -h - radius, slices);
}

TriangleMesh extrude_polygon(const std::vector<std::pair<double, double>>& polygon, double depth) {
  if (polygon.size() < 3 || !(depth > 0.0)) throw DataError("extrusion needs a polygon and a positive depth");
  TriangleMesh m;
  const auto n = static_cast<std::uint32_t>(polygon.size());
  for (double z : {-0.5 * depth, 0.5 * depth})
    for (const auto& [x, y] : polygon) m.vertices.emplace_back(x, y, z);
  for (std::uint32_t i = 1; i + 1 < n; ++i) {
    m.faces.push_back({0, i + 1, i});
    m.faces.push_back({n, n + i, n + i + 1});
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    m.faces.push_back({i, j, n + j});
    m.faces.push_back({i, n + j, n + i});
  }
  return m;
}

TriangleMesh make_box(const Vec3& size) {
  if (!(size.minCoeff() > 0.0)) throw DataError("box dimensions must be positive");
  const double hx = 0.5 * size.x(), hy = 0.5 * size.y();
  return extrude_polygon({{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}}, size.z());
}

TriangleMesh make_l_prism(double leg_x, double leg_y, double arm, double depth) {
  if (!(arm > 0.0 && leg_x > arm && leg_y > arm)) throw DataError("L-prism legs must exceed the arm width");
  // Centered on the bounding box.
  const double cx = 0.5 * leg_x, cy = 0.5 * leg_y;
  return extrude_polygon({{-cx, -cy},
                          {leg_x - cx, -cy},
                          {leg_x - cx, arm - cy},
                          {arm - cx, arm - cy},
                          {arm - cx, leg_y - cy},
                          {-cx, leg_y - cy}},
                         depth);
}

TriangleMesh make_tetrahedron(double edge) {
  if (!(edge > 0.0)) throw DataError("tetrahedron edge must be positive");
  const double a = edge / (2.0 * std::numbers::sqrt2);
  TriangleMesh m;
  m.vertices = {Vec3(a, a, a), Vec3(a, -a, -a), Vec3(-a, a, -a), Vec3(-a, -a, a)};
  m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

}  // namespace graspforge::geometry
