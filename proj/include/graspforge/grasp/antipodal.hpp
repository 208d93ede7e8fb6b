#pragma once

#include <cstdint>
#include <vector>

#include "graspforge/geometry/bvh.hpp"
#include "graspforge/geometry/mesh.hpp"
#include "graspforge/grasp/grasp_config.hpp"

namespace graspforge::grasp {

/// Rejection sampler for parallel-jaw grasps. Each attempt picks an
/// area-weighted surface point and a direction inside the friction cone about
/// its inward normal; the jaws close on the outermost surface crossings of
/// that line. A candidate is kept when it is antipodal and fits the gripper.
/// Stops at samples_per_object candidates or after samples * attempts tries,
/// so the result may be shorter (or empty). The mesh must be watertight.
std::vector<GraspCandidate> sample_antipodal_grasps(const geometry::MeshBvh& bvh, const GraspConfig& config,
                                                    std::uint64_t seed);

std::vector<GraspCandidate> sample_antipodal_grasps(const geometry::TriangleMesh& mesh, const GraspConfig& config,
                                                    std::uint64_t seed);

}  // namespace graspforge::grasp
