#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They favor obviousness over speed and share no code with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Point = std::vector<double>;
using Wrench6 = Eigen::Matrix<double, 6, 1>;

inline double euclid(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// All-pairs k nearest neighbors; every (distance, index) pair is sorted.
inline std::vector<std::vector<std::size_t>> knn_indices(const std::vector<Point>& pts, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) all.emplace_back(euclid(pts[i], pts[j]), j);
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> idx;
    for (std::size_t r = 0; r < k; ++r) idx.push_back(all[r].second);
    out.push_back(idx);
  }
  return out;
}

/// R(O) = (1/k) sum_P D(P)/D(O), D = 1 / mean neighbor distance.
inline std::vector<double> rarity(const std::vector<Point>& pts, std::size_t k, double floor = 1e-9) {
  const auto nn = knn_indices(pts, k);
  std::vector<double> density(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double mean = 0.0;
    for (std::size_t j : nn[i]) mean += std::max(euclid(pts[i], pts[j]), floor);
    density[i] = 1.0 / (mean / static_cast<double>(k));
  }
  std::vector<double> r(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double s = 0.0;
    for (std::size_t j : nn[i]) s += density[j] / density[i];
    r[i] = s / static_cast<double>(k);
  }
  return r;
}

/// Ball radius by polar duality: every 6-subset whose hyperplane w.y = 1
/// system is regular gives a candidate vertex y of {y : w.y <= 1 for all w};
/// the feasible vertex of largest norm is the nearest facet. Assumes the
/// origin is interior.
inline double polar_margin(const std::vector<Wrench6>& w) {
  const std::size_t n = w.size();
  double best = 0.0;
  std::vector<std::size_t> idx(6);
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + 6, true);
  do {
    Eigen::Matrix<double, 6, 6> a;
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) a.row(static_cast<Eigen::Index>(r++)) = w[i].transpose();
    Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(a);
    lu.setThreshold(1e-10);
    if (lu.rank() < 6) continue;
    const Wrench6 y = lu.solve(Wrench6::Ones());
    bool feasible = true;
    for (const auto& v : w)
      if (v.dot(y) > 1.0 + 1e-9) {
        feasible = false;
        break;
      }
    if (feasible) best = std::max(best, y.norm());
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best > 0.0 ? 1.0 / best : 0.0;
}

inline double support(const std::vector<Wrench6>& w, const Wrench6& u) {
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : w) h = std::max(h, u.dot(v));
  return h;
}

/// min over unit directions of the support function, by dense random
/// directions followed by shrinking random-perturbation descent from the best
/// few. Negative when the origin is outside the hull; otherwise an upper
/// estimate of the ball radius that tightens with effort.
inline double dense_min_support(const std::vector<Wrench6>& w, std::size_t directions = 40000, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  auto random_unit = [&] {
    Wrench6 u;
    for (int i = 0; i < 6; ++i) u[i] = normal(gen);
    return Wrench6(u.normalized());
  };
  std::vector<std::pair<double, Wrench6>> samples;
  for (std::size_t i = 0; i < directions; ++i) {
    const Wrench6 u = random_unit();
    samples.emplace_back(support(w, u), u);
  }
  std::partial_sort(samples.begin(), samples.begin() + 16, samples.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = samples.front().first;
  for (std::size_t s = 0; s < 16; ++s) {
    Wrench6 u = samples[s].second;
    double h = samples[s].first;
    for (double step = 0.2; step > 1e-7; step *= 0.7)
      for (int tries = 0; tries < 60; ++tries) {
        const Wrench6 v = (u + step * random_unit()).normalized();
        const double hv = support(w, v);
        if (hv < h) {
          h = hv;
          u = v;
        }
      }
    best = std::min(best, h);
  }
  return best;
}

inline double dense_margin(const std::vector<Wrench6>& w, std::size_t directions = 40000, std::uint64_t seed = 1) {
  return std::max(dense_min_support(w, directions, seed), 0.0);
}

/// Unit friction-cone edge wrenches plus spin wrenches, built from first
/// principles with a world-axis tangent frame. `normal` is the outward normal.
inline void add_contact_wrenches(std::vector<Wrench6>& out, const Eigen::Vector3d& p, const Eigen::Vector3d& normal,
                                 double mu, int m, const Eigen::Vector3d& centroid, double torque_scale,
                                 double patch_radius) {
  const Eigen::Vector3d in = -normal.normalized();
  Eigen::Vector3d helper = std::abs(in.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d t1 = in.cross(helper).normalized();
  const Eigen::Vector3d t2 = in.cross(t1);
  for (int j = 0; j < m; ++j) {
    const double a = 2.0 * std::numbers::pi * j / m;
    const Eigen::Vector3d f = (in + mu * (std::cos(a) * t1 + std::sin(a) * t2)).normalized();
    Wrench6 w;
    w << f, (p - centroid).cross(f) / torque_scale;
    out.push_back(w);
  }
  const double spin = mu * patch_radius / std::sqrt(1.0 + mu * mu) / torque_scale;
  if (spin > 0.0)
    for (double s : {1.0, -1.0}) {
      Wrench6 w;
      w << Eigen::Vector3d::Zero(), s * spin * in;
      out.push_back(w);
    }
}

}  // namespace oracle
