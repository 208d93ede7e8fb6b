#pragma once

#include <cstddef>
#include <optional>

#include "graspforge/geometry/mesh.hpp"
#include "json.hpp"

namespace graspforge::grasp {

using geometry::Vec3;

// Parallel-jaw grasp sampling and quality settings. Lengths in meters.
struct GraspConfig {
  double friction = 0.5;
  std::size_t cone_edges = 8;
  std::size_t samples_per_object = 100;
  std::size_t attempts_per_sample = 20;  // sampling gives up after samples * attempts tries
  double gripper_max_width = 0.08;
  double quality_threshold = 0.002;
  /// Divides torques so wrenches are dimensionless. Unset: the largest
  /// centroid-to-surface distance of the mesh being scored.
  std::optional<double> torque_scale;
  /// Radius of the contact patch whose friction resists spin about the
  /// contact normal. 0 gives pure point contacts.
  double contact_patch_radius = 0.0005;
  std::size_t robustness_trials = 20;
  double position_noise = 0.002;
  double friction_noise = 0.05;

  void validate() const;
};

nlohmann::json to_json(const GraspConfig& c);
GraspConfig grasp_config_from_json(const nlohmann::json& j);

/// A contact with its outward unit surface normal.
struct Contact {
  Vec3 point;
  Vec3 normal;
};

struct GraspCandidate {
  Contact first;   // jaw 1, pushes along +axis
  Contact second;  // jaw 2, pushes along -axis
  Vec3 axis;       // unit, from first.point to second.point
  double width = 0.0;
  double quality = 0.0;
  double robust_quality = 0.0;
};

/// Angle between the inward normal and the direction the jaw pushes is
/// within atan(friction), for both contacts.
bool is_antipodal(const GraspCandidate& g, double friction);

nlohmann::json to_json(const GraspCandidate& g);

}  // namespace graspforge::grasp
