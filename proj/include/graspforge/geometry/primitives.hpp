#pragma once

#include <utility>
#include <vector>

#include "graspforge/geometry/mesh.hpp"

namespace graspforge::geometry {

// Closed, outward-oriented procedural meshes centered on the origin, with
// axes of symmetry along z.

TriangleMesh make_box(const Vec3& size);
TriangleMesh make_uv_sphere(double radius, int slices = 32, int stacks = 16);
TriangleMesh make_cylinder(double radius, double height, int slices = 32);
TriangleMesh make_capsule(double radius, double length, int slices = 32, int cap_stacks = 8);
/// L-shaped cross-section with legs `leg_x` and `leg_y` and arm width `arm`, extruded by `depth`.
TriangleMesh make_l_prism(double leg_x, double leg_y, double arm, double depth);
TriangleMesh make_tetrahedron(double edge);

/// Surface of revolution. `profile` lists (z, radius) rings from top to
/// bottom; the ends are closed by poles at `top_z` and `bottom_z`.
TriangleMesh make_lathe(const std::vector<std::pair<double, double>>& profile, double top_z, double bottom_z,
                        int slices);

/// Prism over a counter-clockwise polygon in the xy-plane that is star-shaped
/// with respect to its first vertex.
TriangleMesh extrude_polygon(const std::vector<std::pair<double, double>>& polygon, double depth);

}  // namespace graspforge::geometry
