#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "graspforge/geometry/mesh.hpp"

namespace graspforge::geometry {

// Wavefront OBJ subset: "v x y z" and triangular "f i j k" (1-based, the
// i/t/n and negative-index forms are accepted on input). Other statements
// such as vn, vt, o, g, s and usemtl are ignored.

TriangleMesh parse_obj(std::string_view text);
std::string format_obj(const TriangleMesh& mesh);

TriangleMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace graspforge::geometry
