#pragma once

#include "graspforge/geometry/mesh.hpp"

namespace graspforge::geometry {

struct SmoothingParams {
  int iterations = 10;
  double alpha = 0.0;  // pull toward the original positions
  double beta = 0.5;   // share of a vertex's own correction versus its neighbors'

  bool operator==(const SmoothingParams&) const = default;
};

/// HC-Laplacian smoothing: each iteration takes the umbrella average, then
/// pushes vertices back by a blend of their own and their neighbors'
/// displacement. Boundary vertices stay fixed. Topology is unchanged.
TriangleMesh smooth_mesh(const TriangleMesh& mesh, const SmoothingParams& params = {});

/// Plain umbrella-operator Laplacian smoothing, for comparison.
TriangleMesh laplacian_smooth(const TriangleMesh& mesh, int iterations);

}  // namespace graspforge::geometry
