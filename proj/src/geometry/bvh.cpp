#include "graspforge/geometry/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "graspforge/core/error.hpp"

namespace graspforge::geometry {
namespace {

constexpr std::uint32_t kLeafSize = 4;

bool ray_box(const Aabb& box, const Vec3& o, const Vec3& inv_d, double t0, double t1) {
  for (int a = 0; a < 3; ++a) {
    double ta = (box.min[a] - o[a]) * inv_d[a];
    double tb = (box.max[a] - o[a]) * inv_d[a];
    if (std::isnan(ta) || std::isnan(tb)) {
      // Direction component is zero and origin lies on a slab plane.
      if (o[a] < box.min[a] || o[a] > box.max[a]) return false;
      continue;
    }
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

double box_distance_sq(const Aabb& box, const Vec3& p) {
  const Vec3 d = (box.min - p).cwiseMax(Vec3::Zero()).cwiseMax(p - box.max);
  return d.squaredNorm();
}

// Moller-Trumbore; returns NaN on a miss.
double ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pv = d.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-300) return std::nan("");
  const double inv = 1.0 / det;
  const Vec3 tv = o - a;
  const double u = tv.dot(pv) * inv;
  if (u < 0.0 || u > 1.0) return std::nan("");
  const Vec3 qv = tv.cross(e1);
  const double v = d.dot(qv) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nan("");
  return e2.dot(qv) * inv;
}

}  // namespace

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

MeshBvh::MeshBvh(const TriangleMesh& mesh) : mesh_(mesh) {
  mesh_.validate();
  const auto n = static_cast<std::uint32_t>(mesh_.faces.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t f = 0; f < n; ++f) {
    const Face& t = mesh_.faces[f];
    centroids[f] = (mesh_.vertices[t[0]] + mesh_.vertices[t[1]] + mesh_.vertices[t[2]]) / 3.0;
  }
  nodes_.reserve(2 * n / kLeafSize + 2);
  if (n > 0) build(0, n, centroids);
}

Aabb MeshBvh::face_box(std::uint32_t f) const {
  Aabb b;
  for (auto i : mesh_.faces[f]) b.expand(mesh_.vertices[i]);
  return b;
}

std::uint32_t MeshBvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box, cbox;
  for (std::uint32_t i = begin; i < end; ++i) {
    const Aabb fb = face_box(order_[i]);
    box.expand(fb.min);
    box.expand(fb.max);
    cbox.expand(centroids[order_[i]]);
  }
  nodes_[index].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[index].leaf = true;
    nodes_[index].left = begin;
    nodes_[index].right = end - begin;
    return index;
  }
  int axis = 0;
  const Vec3 ext = cbox.extent();
  if (ext.y() > ext[axis]) axis = 1;
  if (ext.z() > ext[axis]) axis = 2;
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     if (centroids[a][axis] != centroids[b][axis]) return centroids[a][axis] < centroids[b][axis];
                     return a < b;
                   });
  const std::uint32_t left = build(begin, mid, centroids);
  const std::uint32_t right = build(mid, end, centroids);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::vector<RayHit> MeshBvh::intersect_line(const Vec3& origin, const Vec3& dir, double t_min, double t_max) const {
  std::vector<RayHit> hits;
  if (nodes_.empty()) return hits;
  const Vec3 inv_d(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!ray_box(node.box, origin, inv_d, t_min, t_max)) continue;
    if (!node.leaf) {
      stack.push_back(node.left);
      stack.push_back(node.right);
      continue;
    }
    for (std::uint32_t i = node.left; i < node.left + node.right; ++i) {
      const std::uint32_t f = order_[i];
      const Face& t = mesh_.faces[f];
      const double th = ray_triangle(origin, dir, mesh_.vertices[t[0]], mesh_.vertices[t[1]], mesh_.vertices[t[2]]);
      if (!std::isnan(th) && th >= t_min && th <= t_max) hits.push_back({th, f});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const RayHit& a, const RayHit& b) {
    return a.t != b.t ? a.t < b.t : a.face < b.face;
  });
  return hits;
}

SurfacePoint MeshBvh::closest_point(const Vec3& p) const {
  if (nodes_.empty()) throw DataError("closest_point on an empty mesh");
  SurfacePoint best{Vec3::Zero(), 0, std::numeric_limits<double>::infinity()};
  double best_sq = best.distance;
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (box_distance_sq(node.box, p) > best_sq) continue;
    if (!node.leaf) {
      // Visit the nearer child first.
      const double dl = box_distance_sq(nodes_[node.left].box, p);
      const double dr = box_distance_sq(nodes_[node.right].box, p);
      if (dl < dr) {
        stack.push_back(node.right);
        stack.push_back(node.left);
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
      continue;
    }
    for (std::uint32_t i = node.left; i < node.left + node.right; ++i) {
      const std::uint32_t f = order_[i];
      const Face& t = mesh_.faces[f];
      const Vec3 q = closest_point_on_triangle(p, mesh_.vertices[t[0]], mesh_.vertices[t[1]], mesh_.vertices[t[2]]);
      const double d = (q - p).squaredNorm();
      if (d < best_sq || (d == best_sq && f < best.face)) {
        best_sq = d;
        best = {q, f, 0.0};
      }
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

bool MeshBvh::contains(const Vec3& p) const {
  static const Vec3 kDirections[3] = {Vec3(1.0, 0.2718281828, 0.1414213562).normalized(),
                                      Vec3(-0.3141592653, 1.0, 0.1732050807).normalized(),
                                      Vec3(0.2236067977, -0.1618033988, 1.0).normalized()};
  int votes = 0;
  for (const Vec3& d : kDirections) {
    const auto hits = intersect_line(p, d, 0.0, std::numeric_limits<double>::infinity());
    if (hits.size() % 2 == 1) ++votes;
  }
  return votes >= 2;
}

}  // namespace graspforge::geometry
