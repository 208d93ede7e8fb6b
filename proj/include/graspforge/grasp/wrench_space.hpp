#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "graspforge/geometry/mesh.hpp"
#include "graspforge/grasp/grasp_config.hpp"

namespace graspforge::grasp {

using Wrench = Eigen::Matrix<double, 6, 1>;

struct ContactModel {
  double friction = 0.5;
  std::size_t cone_edges = 8;
  double torque_scale = 1.0;
  double patch_radius = 0.0;
};

ContactModel contact_model(const GraspConfig& config, double torque_scale);

/// Unit friction-cone edge forces of every contact, as (force, torque / scale)
/// about the centroid, followed by the two spin wrenches of each contact when
/// the patch radius and friction are positive. The tangent frame is taken from
/// the direction towards the centroid so the set moves rigidly with the scene.
std::vector<Wrench> primitive_wrenches(const std::vector<Contact>& contacts, const Vec3& centroid,
                                       const ContactModel& model);

/// Radius of the largest origin-centered ball inside the convex hull of the
/// wrenches. 0 when the wrenches span fewer than six dimensions or the origin
/// is not interior.
double hull_margin(const std::vector<Wrench>& wrenches);

double ferrari_canny(const std::vector<Contact>& contacts, const Vec3& centroid, const ContactModel& model);
double ferrari_canny(const GraspCandidate& grasp, const Vec3& centroid, const ContactModel& model);

/// Largest distance from the centroid to the surface (attained at a vertex).
double max_surface_distance(const geometry::TriangleMesh& mesh, const Vec3& centroid);

}  // namespace graspforge::grasp
