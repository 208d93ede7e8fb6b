#pragma once

#include <cstdint>
#include <vector>

#include "graspforge/geometry/bvh.hpp"
#include "graspforge/grasp/grasp_config.hpp"
#include "graspforge/grasp/wrench_space.hpp"

namespace graspforge::grasp {

/// Mesh-level quantities every quality evaluation needs.
struct GraspScene {
  explicit GraspScene(const geometry::TriangleMesh& mesh, const GraspConfig& config = {});

  geometry::MeshBvh bvh;
  Vec3 centroid;
  double torque_scale;
};

/// Mean Ferrari-Canny quality over robustness_trials perturbed copies of the
/// grasp: each contact moves by Gaussian noise and is projected back onto the
/// surface (taking that face's normal), friction gets Gaussian noise floored
/// at 0. Zero noise leaves the grasp untouched. Per-trial values go to
/// `trials` when given.
double robust_quality(const GraspCandidate& grasp, const GraspScene& scene, const GraspConfig& config,
                      std::uint64_t seed, std::vector<double>* trials = nullptr);

struct GraspnessResult {
  double graspness = 0.0;
  std::size_t successes = 0;
  std::vector<GraspCandidate> candidates;  // quality and robust_quality filled in
  double torque_scale = 0.0;
};

/// Samples antipodal grasps and scores each one; graspness is the fraction
/// whose robust quality reaches the threshold (0 without candidates).
GraspnessResult evaluate_graspness(const geometry::TriangleMesh& mesh, const GraspConfig& config,
                                   std::uint64_t seed);

double graspness(const geometry::TriangleMesh& mesh, const GraspConfig& config, std::uint64_t seed);

}  // namespace graspforge::grasp
