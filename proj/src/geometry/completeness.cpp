#include "graspforge/geometry/completeness.hpp"

#include <cmath>
#include <deque>
#include <unordered_map>

#include "graspforge/core/error.hpp"

namespace graspforge::geometry {
namespace {

std::uint64_t pack(const LatticePoint& p) {
  constexpr std::uint64_t kBias = 1u << 20;
  return ((static_cast<std::uint64_t>(p[0]) + kBias) & 0x1fffff) |
         (((static_cast<std::uint64_t>(p[1]) + kBias) & 0x1fffff) << 21) |
         (((static_cast<std::uint64_t>(p[2]) + kBias) & 0x1fffff) << 42);
}

}  // namespace

std::vector<int> dbscan(const std::vector<LatticePoint>& points, const DbscanParams& params) {
  if (!(params.radius > 0.0)) throw DataError("DBSCAN radius must be positive");
  if (params.min_points == 0) throw DataError("DBSCAN min-points must be positive");

  std::vector<LatticePoint> offsets;
  const int reach = static_cast<int>(std::floor(params.radius));
  const double r2 = params.radius * params.radius;
  for (int dz = -reach; dz <= reach; ++dz)
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx)
        if (dx * dx + dy * dy + dz * dz <= r2) offsets.push_back({dx, dy, dz});

  std::unordered_map<std::uint64_t, std::size_t> lookup;
  lookup.reserve(points.size() * 2);
  for (std::size_t i = 0; i < points.size(); ++i) lookup.emplace(pack(points[i]), i);

  auto neighbors = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (const auto& o : offsets) {
      const LatticePoint q = {points[i][0] + o[0], points[i][1] + o[1], points[i][2] + o[2]};
      if (auto it = lookup.find(pack(q)); it != lookup.end()) out.push_back(it->second);
    }
    return out;
  };

  constexpr int kUnvisited = -2;
  std::vector<int> label(points.size(), kUnvisited);
  int clusters = 0;
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (label[i] != kUnvisited) continue;
    auto seeds = neighbors(i);
    if (seeds.size() < params.min_points) {
      label[i] = kNoise;
      continue;
    }
    const int c = clusters++;
    label[i] = c;
    queue.assign(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const std::size_t j = queue.front();
      queue.pop_front();
      if (label[j] == kNoise) label[j] = c;
      if (label[j] != kUnvisited) continue;
      label[j] = c;
      auto nj = neighbors(j);
      if (nj.size() >= params.min_points) queue.insert(queue.end(), nj.begin(), nj.end());
    }
  }
  return label;
}

CompletenessReport completeness(const VoxelGrid& grid, const DbscanParams& params) {
  std::vector<LatticePoint> points;
  const int r = static_cast<int>(grid.resolution());
  for (int z = 0; z < r; ++z)
    for (int y = 0; y < r; ++y)
      for (int x = 0; x < r; ++x)
        if (grid.at(x, y, z) >= 0.5) points.push_back({x, y, z});
  if (points.empty()) throw DataError("completeness of a grid with no occupied voxels is undefined");

  const auto labels = dbscan(points, params);
  std::vector<std::size_t> sizes;
  for (int l : labels) {
    if (l == kNoise) continue;
    if (static_cast<std::size_t>(l) >= sizes.size()) sizes.resize(l + 1, 0);
    ++sizes[l];
  }
  CompletenessReport report;
  report.occupied = points.size();
  report.cluster_count = sizes.size();
  for (auto s : sizes) report.major_cluster_size = std::max(report.major_cluster_size, s);
  report.outlier_percentage = 100.0 * static_cast<double>(report.occupied - report.major_cluster_size) /
                              static_cast<double>(report.occupied);
  return report;
}

}  // namespace graspforge::geometry
