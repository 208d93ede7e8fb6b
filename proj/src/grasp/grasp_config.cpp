#include "graspforge/grasp/grasp_config.hpp"

#include <cmath>
#include <set>

#include "graspforge/core/error.hpp"

namespace graspforge::grasp {
namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grasp key \"") + key + "\": " + e.what());
  }
}

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

void GraspConfig::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(friction)) throw ConfigError("friction must be a non-negative number");
  if (cone_edges < 3) throw ConfigError("cone_edges must be at least 3");
  if (samples_per_object == 0) throw ConfigError("samples_per_object must be positive");
  if (attempts_per_sample == 0) throw ConfigError("attempts_per_sample must be positive");
  if (!(gripper_max_width > 0.0) || !std::isfinite(gripper_max_width))
    throw ConfigError("gripper_max_width must be positive");
  if (!(quality_threshold > 0.0) || !std::isfinite(quality_threshold))
    throw ConfigError("quality_threshold must be positive");
  if (torque_scale && (!(*torque_scale > 0.0) || !std::isfinite(*torque_scale)))
    throw ConfigError("torque_scale must be positive");
  if (!finite_nonneg(contact_patch_radius)) throw ConfigError("contact_patch_radius must be non-negative");
  if (robustness_trials == 0) throw ConfigError("robustness_trials must be positive");
  if (!finite_nonneg(position_noise) || !finite_nonneg(friction_noise))
    throw ConfigError("noise standard deviations must be non-negative");
}

json to_json(const GraspConfig& c) {
  return json{{"friction", c.friction},
              {"cone_edges", c.cone_edges},
              {"samples_per_object", c.samples_per_object},
              {"attempts_per_sample", c.attempts_per_sample},
              {"gripper_max_width", c.gripper_max_width},
              {"quality_threshold", c.quality_threshold},
              {"torque_scale", c.torque_scale ? json(*c.torque_scale) : json(nullptr)},
              {"contact_patch_radius", c.contact_patch_radius},
              {"robustness_trials", c.robustness_trials},
              {"position_noise", c.position_noise},
              {"friction_noise", c.friction_noise}};
}

GraspConfig grasp_config_from_json(const json& j) {
  static const std::set<std::string> known{"friction",          "cone_edges",         "samples_per_object",
                                           "attempts_per_sample", "gripper_max_width", "quality_threshold",
                                           "torque_scale",       "contact_patch_radius", "robustness_trials",
                                           "position_noise",     "friction_noise"};
  if (!j.is_object()) throw ConfigError("grasp must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown grasp key \"" + key + "\"");
  GraspConfig c;
  read(j, "friction", c.friction);
  read(j, "cone_edges", c.cone_edges);
  read(j, "samples_per_object", c.samples_per_object);
  read(j, "attempts_per_sample", c.attempts_per_sample);
  read(j, "gripper_max_width", c.gripper_max_width);
  read(j, "quality_threshold", c.quality_threshold);
  if (j.contains("torque_scale") && !j.at("torque_scale").is_null()) {
    double s = 0.0;
    read(j, "torque_scale", s);
    c.torque_scale = s;
  }
  read(j, "contact_patch_radius", c.contact_patch_radius);
  read(j, "robustness_trials", c.robustness_trials);
  read(j, "position_noise", c.position_noise);
  read(j, "friction_noise", c.friction_noise);
  c.validate();
  return c;
}

bool is_antipodal(const GraspCandidate& g, double friction) {
  const double cos_limit = 1.0 / std::sqrt(1.0 + friction * friction);
  // Jaw 1 pushes along +axis, so its inward normal -n1 must lie near +axis.
  const double c1 = -g.first.normal.dot(g.axis);
  const double c2 = g.second.normal.dot(g.axis);
  return c1 >= cos_limit && c2 >= cos_limit;
}

json to_json(const GraspCandidate& g) {
  return json{{"p1", vec(g.first.point)},   {"n1", vec(g.first.normal)}, {"p2", vec(g.second.point)},
              {"n2", vec(g.second.normal)}, {"axis", vec(g.axis)},       {"width", g.width},
              {"quality", g.quality},       {"robust_quality", g.robust_quality}};
}

}  // namespace graspforge::grasp
