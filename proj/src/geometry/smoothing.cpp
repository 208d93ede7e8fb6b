#include "graspforge/geometry/smoothing.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "graspforge/core/error.hpp"

namespace graspforge::geometry {
namespace {

struct Adjacency {
  std::vector<std::vector<std::uint32_t>> neighbors;
  std::vector<char> boundary;
};

Adjacency build_adjacency(const TriangleMesh& mesh) {
  mesh.validate();
  Adjacency adj;
  adj.neighbors.resize(mesh.vertices.size());
  adj.boundary.assign(mesh.vertices.size(), 0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
  for (const Face& f : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = f[k], b = f[(k + 1) % 3];
      ++edge_use[{std::min(a, b), std::max(a, b)}];
    }
  for (const auto& [edge, count] : edge_use) {
    adj.neighbors[edge.first].push_back(edge.second);
    adj.neighbors[edge.second].push_back(edge.first);
    if (count == 1) adj.boundary[edge.first] = adj.boundary[edge.second] = 1;
  }
  return adj;
}

bool movable(const Adjacency& adj, std::size_t i) { return !adj.boundary[i] && !adj.neighbors[i].empty(); }

std::vector<Vec3> umbrella(const Adjacency& adj, const std::vector<Vec3>& p) {
  std::vector<Vec3> q = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!movable(adj, i)) continue;
    Vec3 s = Vec3::Zero();
    for (auto j : adj.neighbors[i]) s += p[j];
    q[i] = s / static_cast<double>(adj.neighbors[i].size());
  }
  return q;
}

}  // namespace

TriangleMesh smooth_mesh(const TriangleMesh& mesh, const SmoothingParams& params) {
  if (params.iterations < 0) throw DataError("smoothing iterations must be non-negative");
  if (params.alpha < 0.0 || params.alpha > 1.0 || params.beta < 0.0 || params.beta > 1.0)
    throw DataError("HC smoothing parameters alpha and beta must lie in [0, 1]");
  TriangleMesh out = mesh;
  if (params.iterations == 0) return out;
  const Adjacency adj = build_adjacency(mesh);
  const std::vector<Vec3>& original = mesh.vertices;
  std::vector<Vec3> p = mesh.vertices;
  std::vector<Vec3> b(p.size());
  for (int it = 0; it < params.iterations; ++it) {
    std::vector<Vec3> q = umbrella(adj, p);
    for (std::size_t i = 0; i < p.size(); ++i)
      b[i] = movable(adj, i) ? Vec3(q[i] - (params.alpha * original[i] + (1.0 - params.alpha) * p[i])) : Vec3::Zero();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!movable(adj, i)) continue;
      Vec3 s = Vec3::Zero();
      for (auto j : adj.neighbors[i]) s += b[j];
      q[i] -= params.beta * b[i] + (1.0 - params.beta) * s / static_cast<double>(adj.neighbors[i].size());
    }
    p = std::move(q);
  }
  out.vertices = std::move(p);
  return out;
}

TriangleMesh laplacian_smooth(const TriangleMesh& mesh, int iterations) {
  if (iterations < 0) throw DataError("smoothing iterations must be non-negative");
  TriangleMesh out = mesh;
  if (iterations == 0) return out;
  const Adjacency adj = build_adjacency(mesh);
  for (int it = 0; it < iterations; ++it) out.vertices = umbrella(adj, out.vertices);
  return out;
}

}  // namespace graspforge::geometry
