#include "graspforge/grasp/wrench_space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"

namespace graspforge::grasp {
namespace {

using Mat6 = Eigen::Matrix<double, 6, 6>;

// Tangent direction for the cone edges at a contact with inward normal m.
Vec3 tangent_reference(const Vec3& point, const Vec3& m, const Vec3& centroid, double scale) {
  Vec3 r = centroid - point;
  r -= r.dot(m) * m;
  if (r.norm() > 1e-9 * scale) return r.normalized();
  // Contact normal passes through the centroid; any tangent works up to a spin
  // about the normal. Pick the world axis least aligned with m.
  Eigen::Index axis = 0;
  m.cwiseAbs().minCoeff(&axis);
  Vec3 e = Vec3::Unit(axis);
  e -= e.dot(m) * m;
  return e.normalized();
}

// Beneath-beyond convex hull in R^6 over simplicial facets. Points are
// expected in general position (see joggle below).
struct Facet {
  std::array<int, 6> v;
  std::array<int, 6> nb;  // neighbor across the ridge opposite v[k]
  Wrench normal;
  double offset;
  bool alive;
};

class Hull {
 public:
  Hull(const std::vector<Wrench>& pts, double tolerance) : pts_(pts), tol_(tolerance) {}

  bool build(const std::array<int, 7>& simplex) {
    interior_.setZero();
    for (int i : simplex) interior_ += pts_[static_cast<std::size_t>(i)];
    interior_ /= 7.0;
    for (int omit = 0; omit < 7; ++omit) {
      Facet f{};
      int w = 0;
      for (int k = 0; k < 7; ++k)
        if (k != omit) {
          f.v[static_cast<std::size_t>(w)] = simplex[static_cast<std::size_t>(k)];
          f.nb[static_cast<std::size_t>(w)] = k;  // facet index == omitted simplex slot
          ++w;
        }
      if (!fit(f)) return false;
      facets_.push_back(f);
    }
    facets_.reserve(64 * pts_.size());
    // Far points first: they tend to be hull vertices, so fewer facets are
    // created and discarded along the way.
    std::vector<char> used(pts_.size(), 0);
    for (int i : simplex) used[static_cast<std::size_t>(i)] = 1;
    std::vector<std::pair<double, int>> order;
    for (std::size_t i = 0; i < pts_.size(); ++i)
      if (!used[i]) order.emplace_back(-(pts_[i] - interior_).squaredNorm(), static_cast<int>(i));
    std::sort(order.begin(), order.end());
    for (const auto& [d, i] : order)
      if (!add(i)) return false;
    return true;
  }

  const std::vector<Facet>& facets() const { return facets_; }

 private:
  bool fit(Facet& f) const {
    // Orthonormalize the edge vectors (Gram-Schmidt), then take the
    // unit axis with the largest residual as the seed of the normal.
    std::array<Wrench, 5> b;
    const Wrench& base = pts_[static_cast<std::size_t>(f.v[0])];
    for (std::size_t k = 0; k < 5; ++k) {
      Wrench e = pts_[static_cast<std::size_t>(f.v[k + 1])] - base;
      for (std::size_t i = 0; i < k; ++i) e -= e.dot(b[i]) * b[i];
      const double len = e.norm();
      if (!(len > 0.0)) return false;
      b[k] = e / len;
    }
    Eigen::Index axis = 0;
    Wrench weight = Wrench::Ones();
    for (const auto& v : b) weight -= v.cwiseAbs2();
    weight.maxCoeff(&axis);
    Wrench n = Wrench::Unit(axis);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : b) n -= n.dot(v) * v;
    f.normal = n.normalized();
    f.offset = f.normal.dot(base);
    const double side = f.normal.dot(interior_) - f.offset;
    if (std::abs(side) <= tol_) return false;
    if (side > 0.0) {
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    f.alive = true;
    return true;
  }

  bool add(int p) {
    const Wrench& x = pts_[static_cast<std::size_t>(p)];
    visible_.clear();
    for (std::size_t f = 0; f < facets_.size(); ++f)
      if (facets_[f].alive && facets_[f].normal.dot(x) - facets_[f].offset > tol_)
        visible_.push_back(static_cast<int>(f));
    if (visible_.empty()) return true;
    vis_.assign(facets_.size(), 0);
    for (int f : visible_) vis_[static_cast<std::size_t>(f)] = 1;

    created_.clear();
    for (int f : visible_) {
      for (std::size_t k = 0; k < 6; ++k) {
        const int g = facets_[static_cast<std::size_t>(f)].nb[k];
        if (vis_[static_cast<std::size_t>(g)]) continue;
        Facet h{};
        std::size_t w = 0;
        for (std::size_t j = 0; j < 6; ++j)
          if (j != k) h.v[w++] = facets_[static_cast<std::size_t>(f)].v[j];
        h.v[5] = p;
        h.nb.fill(-1);
        h.nb[5] = g;
        if (!fit(h)) return false;
        const int id = static_cast<int>(facets_.size());
        facets_.push_back(h);
        auto& gnb = facets_[static_cast<std::size_t>(g)].nb;
        auto it = std::find(gnb.begin(), gnb.end(), f);
        if (it == gnb.end()) return false;
        *it = id;
        created_.push_back(id);
      }
    }
    // Ridges through p pair up the new facets: sort by the four other
    // vertices and match neighbors in the sorted list.
    ridges_.clear();
    for (int id : created_) {
      const auto& v = facets_[static_cast<std::size_t>(id)].v;
      for (std::size_t k = 0; k < 5; ++k) {
        std::array<int, 4> key{};
        std::size_t w = 0;
        for (std::size_t j = 0; j < 5; ++j)
          if (j != k) key[w++] = v[j];
        std::sort(key.begin(), key.end());
        Ridge r{};
        for (int q : key) r.key = (r.key << 16) | static_cast<std::uint64_t>(q);
        r.facet = id;
        r.slot = static_cast<int>(k);
        ridges_.push_back(r);
      }
    }
    std::sort(ridges_.begin(), ridges_.end(), [](const Ridge& a, const Ridge& b) { return a.key < b.key; });
    if (ridges_.size() % 2 != 0) return false;
    for (std::size_t i = 0; i < ridges_.size(); i += 2) {
      const Ridge& a = ridges_[i];
      const Ridge& b = ridges_[i + 1];
      if (a.key != b.key || (i + 2 < ridges_.size() && ridges_[i + 2].key == a.key)) return false;
      facets_[static_cast<std::size_t>(a.facet)].nb[static_cast<std::size_t>(a.slot)] = b.facet;
      facets_[static_cast<std::size_t>(b.facet)].nb[static_cast<std::size_t>(b.slot)] = a.facet;
    }
    for (int f : visible_) facets_[static_cast<std::size_t>(f)].alive = false;
    return true;
  }

  struct Ridge {
    std::uint64_t key;  // four sorted 16-bit vertex indices
    int facet;
    int slot;
  };

  const std::vector<Wrench>& pts_;
  double tol_;
  Wrench interior_;
  std::vector<Facet> facets_;
  std::vector<int> visible_;
  std::vector<char> vis_;
  std::vector<int> created_;
  std::vector<Ridge> ridges_;
};

// Greedy affinely independent 7-subset; false when the points span < 6 dims.
bool initial_simplex(const std::vector<Wrench>& pts, double tolerance, std::array<int, 7>& out) {
  Wrench mean = Wrench::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  std::size_t first = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if ((pts[i] - mean).norm() > best) {
      best = (pts[i] - mean).norm();
      first = i;
    }
  out[0] = static_cast<int>(first);
  std::vector<Wrench> basis;
  for (std::size_t step = 1; step < 7; ++step) {
    std::size_t pick = 0;
    double far = -1.0;
    Wrench pick_residual;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Wrench r = pts[i] - pts[first];
      for (const auto& b : basis) r -= r.dot(b) * b;
      if (r.norm() > far) {
        far = r.norm();
        pick = i;
        pick_residual = r;
      }
    }
    if (far <= tolerance) return false;
    basis.push_back(pick_residual / far);
    out[step] = static_cast<int>(pick);
  }
  return true;
}

double support(const std::vector<Wrench>& pts, const Wrench& u) {
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts) h = std::max(h, u.dot(p));
  return h;
}

// Re-fit the hyperplane through the points that (nearly) attain the support
// value in direction u; recovers the exact facet normal of the unjoggled set.
double polish(const std::vector<Wrench>& pts, const Wrench& u, double h, double band) {
  std::vector<const Wrench*> active;
  for (const auto& p : pts)
    if (u.dot(p) >= h - band) active.push_back(&p);
  if (active.size() < 6) return h;
  Wrench mean = Wrench::Zero();
  for (const auto* p : active) mean += *p;
  mean /= static_cast<double>(active.size());
  Eigen::Matrix<double, 6, Eigen::Dynamic> centered(6, static_cast<Eigen::Index>(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i) centered.col(static_cast<Eigen::Index>(i)) = *active[i] - mean;
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, Eigen::Dynamic>> svd(centered, Eigen::ComputeFullU);
  Wrench n = svd.matrixU().col(5);
  if (n.dot(u) < 0.0) n = -n;
  return std::min(h, support(pts, n));
}

}  // namespace

ContactModel contact_model(const GraspConfig& config, double torque_scale) {
  return {config.friction, config.cone_edges, torque_scale, config.contact_patch_radius};
}

std::vector<Wrench> primitive_wrenches(const std::vector<Contact>& contacts, const Vec3& centroid,
                                       const ContactModel& model) {
  if (model.cone_edges < 3) throw ConfigError("cone_edges must be at least 3");
  if (!(model.torque_scale > 0.0)) throw ConfigError("torque scale must be positive");
  if (!(model.friction >= 0.0)) throw ConfigError("friction must be non-negative");
  std::vector<Wrench> out;
  const double mu = model.friction;
  const double norm = 1.0 / std::sqrt(1.0 + mu * mu);
  for (const auto& c : contacts) {
    const Vec3 m = -c.normal.normalized();  // forces push into the object
    const Vec3 t1 = tangent_reference(c.point, m, centroid, model.torque_scale);
    const Vec3 t2 = m.cross(t1);
    const Vec3 arm = c.point - centroid;
    for (std::size_t j = 0; j < model.cone_edges; ++j) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(model.cone_edges);
      const Vec3 f = norm * (m + mu * (std::cos(theta) * t1 + std::sin(theta) * t2));
      Wrench w;
      w << f, arm.cross(f) / model.torque_scale;
      out.push_back(w);
    }
    const double spin = mu * model.patch_radius * norm / model.torque_scale;
    if (spin > 0.0)
      for (double sign : {1.0, -1.0}) {
        Wrench w;
        w << Vec3::Zero(), sign * spin * m;
        out.push_back(w);
      }
  }
  return out;
}

double hull_margin(const std::vector<Wrench>& wrenches) {
  if (wrenches.size() < 7) return 0.0;
  if (wrenches.size() > 0xffff) throw DataError("hull_margin: too many wrenches");
  double scale = 0.0;
  for (const auto& w : wrenches) scale = std::max(scale, w.norm());
  if (!(scale > 0.0) || !std::isfinite(scale)) return 0.0;

  std::array<int, 7> simplex{};
  if (!initial_simplex(wrenches, 1e-9 * scale, simplex)) return 0.0;

  // Joggle by small combinations of the points themselves: this breaks the
  // coplanar structure of the cone edges and rotates with the scene.
  const std::size_t n = wrenches.size();
  Rng rng(0x9e3779b97f4a7c15ULL);
  std::vector<double> coeff(n * n);
  for (auto& c : coeff) c = rng.uniform(-1.0, 1.0);
  for (double eps : {1e-7, 1e-5, 1e-3}) {
    std::vector<Wrench> jog(n);
    for (std::size_t i = 0; i < n; ++i) {
      Wrench mix = Wrench::Zero();
      for (std::size_t j = 0; j < n; ++j) mix += coeff[i * n + j] * wrenches[j];
      jog[i] = wrenches[i] + (eps / static_cast<double>(n)) * mix;
    }
    Hull hull(jog, 1e-12 * scale);
    if (!hull.build(simplex)) continue;

    std::vector<std::pair<double, std::size_t>> ranked;
    const auto& facets = hull.facets();
    for (std::size_t f = 0; f < facets.size(); ++f)
      if (facets[f].alive) ranked.emplace_back(support(wrenches, facets[f].normal), f);
    if (ranked.empty()) continue;
    std::sort(ranked.begin(), ranked.end());
    double q = ranked.front().first;
    for (std::size_t r = 0; r < std::min<std::size_t>(ranked.size(), 4); ++r)
      q = std::min(q, polish(wrenches, facets[ranked[r].second].normal, ranked[r].first, 10.0 * eps * scale));
    return q > 1e-12 * scale ? q : 0.0;
  }
  throw Error("hull_margin: convex hull construction failed");
}

double ferrari_canny(const std::vector<Contact>& contacts, const Vec3& centroid, const ContactModel& model) {
  return hull_margin(primitive_wrenches(contacts, centroid, model));
}

double ferrari_canny(const GraspCandidate& grasp, const Vec3& centroid, const ContactModel& model) {
  return ferrari_canny(std::vector<Contact>{grasp.first, grasp.second}, centroid, model);
}

double max_surface_distance(const geometry::TriangleMesh& mesh, const Vec3& centroid) {
  if (mesh.vertices.empty()) throw DataError("max_surface_distance: empty mesh");
  double d = 0.0;
  for (const auto& v : mesh.vertices) d = std::max(d, (v - centroid).norm());
  return d;
}

}  // namespace graspforge::grasp
