#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "graspforge/core/error.hpp"
#include "graspforge/core/rng.hpp"
#include "graspforge/geometry/bvh.hpp"
#include "graspforge/geometry/completeness.hpp"
#include "graspforge/geometry/marching_cubes.hpp"
#include "graspforge/geometry/mesh.hpp"
#include "graspforge/geometry/obj_io.hpp"
#include "graspforge/geometry/pca.hpp"
#include "graspforge/geometry/primitives.hpp"
#include "graspforge/geometry/smoothing.hpp"
#include "graspforge/geometry/toy_shapes.hpp"
#include "graspforge/geometry/voxel_grid.hpp"
#include "graspforge/geometry/voxelize.hpp"

using namespace graspforge;
using namespace graspforge::geometry;

namespace {

constexpr double kPi = std::numbers::pi;

// Binary grid of the voxels whose centers lie within `radius` of `center` (voxel units).
VoxelGrid rasterized_sphere(std::uint32_t resolution, const Vec3& center, double radius) {
  VoxelGrid g(resolution, Vec3::Zero(), 1.0);
  for (std::uint32_t z = 0; z < resolution; ++z)
    for (std::uint32_t y = 0; y < resolution; ++y)
      for (std::uint32_t x = 0; x < resolution; ++x)
        if ((g.center(x, y, z) - center).norm() <= radius) g.set(x, y, z, 1.0);
  return g;
}

void fill_block(VoxelGrid& g, int x0, int y0, int z0, int sx, int sy, int sz) {
  for (int z = z0; z < z0 + sz; ++z)
    for (int y = y0; y < y0 + sy; ++y)
      for (int x = x0; x < x0 + sx; ++x) g.set(x, y, z, 1.0);
}

// Random union of small balls and boxes that stays one voxel clear of the boundary.
VoxelGrid random_blobs(Rng& rng, std::uint32_t resolution, int blobs) {
  VoxelGrid g(resolution, Vec3::Zero(), 1.0);
  const double r = resolution;
  for (int b = 0; b < blobs; ++b) {
    const double rad = rng.uniform(1.0, 3.0);
    const Vec3 c(rng.uniform(rad + 1.5, r - rad - 1.5), rng.uniform(rad + 1.5, r - rad - 1.5),
                 rng.uniform(rad + 1.5, r - rad - 1.5));
    for (std::uint32_t z = 1; z + 1 < resolution; ++z)
      for (std::uint32_t y = 1; y + 1 < resolution; ++y)
        for (std::uint32_t x = 1; x + 1 < resolution; ++x) {
          const Vec3 d = (g.center(x, y, z) - c).cwiseAbs();
          const bool in = (b % 2 == 0) ? d.norm() <= rad : d.maxCoeff() <= rad;
          if (in) g.set(x, y, z, 1.0);
        }
  }
  return g;
}

// Largest 26-connected component, by union-find over all occupied pairs.
std::size_t largest_component_oracle(const VoxelGrid& g) {
  std::vector<std::array<int, 3>> pts;
  const int r = static_cast<int>(g.resolution());
  for (int z = 0; z < r; ++z)
    for (int y = 0; y < r; ++y)
      for (int x = 0; x < r; ++x)
        if (g.at(x, y, z) >= 0.5) pts.push_back({x, y, z});
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const int dx = std::abs(pts[i][0] - pts[j][0]), dy = std::abs(pts[i][1] - pts[j][1]),
                dz = std::abs(pts[i][2] - pts[j][2]);
      if (dx <= 1 && dy <= 1 && dz <= 1) parent[find(i)] = find(j);
    }
  std::vector<std::size_t> size(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) ++size[find(i)];
  return pts.empty() ? 0 : *std::max_element(size.begin(), size.end());
}

double max_vertex_error(const TriangleMesh& a, const TriangleMesh& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) e = std::max(e, (a.vertices[i] - b.vertices[i]).cwiseAbs().maxCoeff());
  return e;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("graspforge_test_" + name);
}

}  // namespace

TEST_CASE("primitives are closed, consistently oriented and outward") {
  const std::vector<TriangleMesh> meshes = {
      make_box(Vec3(0.03, 0.05, 0.07)), make_uv_sphere(0.04), make_cylinder(0.02, 0.1),
      make_capsule(0.02, 0.06),         make_l_prism(0.08, 0.06, 0.02, 0.03), make_tetrahedron(0.05),
      make_capsule(0.02, 0.0)};
  for (const auto& m : meshes) {
    CHECK_NOTHROW(m.validate());
    CHECK(m.is_watertight());
    CHECK(m.is_consistently_oriented());
    CHECK(m.signed_volume() > 0.0);
  }
  CHECK(make_box(Vec3(0.03, 0.05, 0.07)).signed_volume() == doctest::Approx(0.03 * 0.05 * 0.07).epsilon(1e-12));
  const double l_area = 0.08 * 0.02 + 0.02 * 0.04;
  CHECK(make_l_prism(0.08, 0.06, 0.02, 0.03).signed_volume() == doctest::Approx(l_area * 0.03).epsilon(1e-12));
  CHECK(make_uv_sphere(1.0, 128, 64).signed_volume() == doctest::Approx(4.0 / 3.0 * kPi).epsilon(2e-3));
}

TEST_CASE("mesh validation rejects bad faces") {
  TriangleMesh m = make_tetrahedron(1.0);
  m.faces.push_back({0, 0, 1});
  CHECK_THROWS_AS(m.validate(), DataError);
  m.faces.back() = {0, 1, 9};
  CHECK_THROWS_AS(m.validate(), DataError);
  TriangleMesh open = make_tetrahedron(1.0);
  open.faces.pop_back();
  CHECK_FALSE(open.is_watertight());
}

TEST_CASE("OBJ round trip of a tetrahedron") {
  const TriangleMesh m = make_tetrahedron(0.1);
  const auto path = temp_path("tetra.obj");
  save_mesh(m, path);
  const TriangleMesh back = load_mesh(path);
  std::filesystem::remove(path);
  CHECK(back.faces == m.faces);
  REQUIRE(back.vertices.size() == m.vertices.size());
  CHECK(max_vertex_error(m, back) < 1e-6);
}

TEST_CASE("OBJ round trip of a 1000-vertex sphere") {
  const TriangleMesh m = make_uv_sphere(0.05, 32, 32);
  CHECK(m.vertices.size() == 994);
  const TriangleMesh back = parse_obj(format_obj(m));
  CHECK(back.faces == m.faces);
  CHECK(max_vertex_error(m, back) < 1e-6);
}

TEST_CASE("OBJ parsing accepts common forms and reports errors by line") {
  const TriangleMesh m = parse_obj("# comment\no thing\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nv 0 1 0\nf 1/1/1 2//1 -1\n");
  REQUIRE(m.faces.size() == 1);
  CHECK(m.faces[0] == Face{0, 1, 2});

  try {
    parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    FAIL("quad accepted");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("face 1") != std::string::npos);
    CHECK(e.line() == 5);
  }
  CHECK_THROWS_AS(parse_obj("v 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n"), ParseError);
  CHECK_THROWS_AS(parse_obj("v 0 0 zz\n"), ParseError);
  CHECK_THROWS_AS(load_mesh(temp_path("does_not_exist.obj")), DataError);
}

TEST_CASE("BVH line queries match brute force") {
  const TriangleMesh m = make_capsule(0.3, 0.5, 24, 6);
  const MeshBvh bvh(m);
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 o(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec3 d = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
    const auto hits = bvh.intersect_line(o, d, -10.0, 10.0);
    // Brute force: intersect the line with every triangle plane and test barycentrics.
    std::vector<double> ts;
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
      const Vec3& a = m.vertices[m.faces[f][0]];
      const Vec3& b = m.vertices[m.faces[f][1]];
      const Vec3& c = m.vertices[m.faces[f][2]];
      const Vec3 n = (b - a).cross(c - a);
      if (std::abs(n.dot(d)) < 1e-14) continue;
      const double t = n.dot(a - o) / n.dot(d);
      const Vec3 p = o + t * d;
      const double area = n.norm();
      const double u = (c - b).cross(p - b).dot(n) / (area * area);
      const double v = (a - c).cross(p - c).dot(n) / (area * area);
      if (u >= -1e-12 && v >= -1e-12 && u + v <= 1.0 + 1e-12) ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    REQUIRE(hits.size() == ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(hits[i].t == doctest::Approx(ts[i]).epsilon(1e-9));
  }
}

TEST_CASE("BVH closest point matches brute force and inside test works") {
  const TriangleMesh m = make_l_prism(0.8, 0.6, 0.2, 0.3);
  const MeshBvh bvh(m);
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec3 p(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7), rng.uniform(-0.4, 0.4));
    double best = 1e300;
    for (const Face& f : m.faces)
      best = std::min(best, (closest_point_on_triangle(p, m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]) - p).norm());
    const SurfacePoint sp = bvh.closest_point(p);
    CHECK(sp.distance == doctest::Approx(best).epsilon(1e-12));
    CHECK((sp.point - p).norm() == doctest::Approx(best).epsilon(1e-12));
  }
  // The L occupies the bottom bar and the left bar of its bounding box.
  CHECK(bvh.contains(Vec3(0.0, -0.25, 0.0)));
  CHECK(bvh.contains(Vec3(-0.35, 0.2, 0.1)));
  CHECK_FALSE(bvh.contains(Vec3(0.2, 0.2, 0.0)));
  CHECK_FALSE(bvh.contains(Vec3(0.0, 0.0, 0.5)));
}

TEST_CASE("voxel grid file round trip") {
  Rng rng(2);
  VoxelGrid g(9, Vec3(0.1, -0.2, 0.3), 0.01);
  for (double& v : g.values()) v = rng.uniform() < 0.3 ? 1.0 : 0.0;
  const auto bytes = serialize_voxels(g);
  CHECK(bytes.size() == 4 + 4 + 4 + 24 + 8 + (729 + 7) / 8);
  CHECK(deserialize_voxels(bytes) == g);

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(deserialize_voxels(bad), ParseError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(deserialize_voxels(bad), ParseError);
  VoxelGrid real = g;
  real.values()[0] = 0.4;
  CHECK_THROWS_AS(serialize_voxels(real), DataError);
}

TEST_CASE("voxel bits are x-fastest and least significant first") {
  VoxelGrid g(2, Vec3::Zero(), 1.0);
  g.set(1, 0, 0, 1.0);
  g.set(0, 0, 1, 1.0);
  const auto bytes = serialize_voxels(g);
  CHECK(bytes.back() == 0b00010010);
}

TEST_CASE("voxelize a cube exactly") {
  // At resolution 40 the normalized cube spans 36 cells with faces on cell boundaries.
  const auto res = voxelize(make_box(Vec3(2.0, 2.0, 2.0)), 40);
  CHECK(res.solid);
  const double expected = 36.0 * 36.0 * 36.0;
  const double count = static_cast<double>(res.grid.occupied_count());
  CHECK(std::abs(count - expected) / expected < 0.02);
  CHECK(count == expected);
  // Grid bounds contain the mesh.
  CHECK(res.grid.origin().maxCoeff() < -1.0);
  CHECK((res.grid.origin() + Vec3::Constant(40 * res.grid.voxel_size())).minCoeff() > 1.0);
}

TEST_CASE("voxelize a sphere within 5 percent and converging") {
  const TriangleMesh sphere = make_uv_sphere(1.0, 128, 64);
  double previous_error = 1.0;
  for (std::uint32_t r : {32u, 64u}) {
    const auto res = voxelize(sphere, r);
    const double radius_vox = 1.0 / res.grid.voxel_size();
    const double expected = 4.0 / 3.0 * kPi * radius_vox * radius_vox * radius_vox;
    const double error = std::abs(static_cast<double>(res.grid.occupied_count()) - expected) / expected;
    CHECK(error < 0.05);
    CHECK(error <= previous_error);
    previous_error = error;
  }
}

TEST_CASE("voxelize contracts") {
  CHECK_THROWS_AS(voxelize(TriangleMesh{}, 16), DataError);
  TriangleMesh open = make_box(Vec3(1, 1, 1));
  open.faces.pop_back();
  const auto res = voxelize(open, 16);
  CHECK_FALSE(res.solid);
  CHECK_FALSE(res.warning.empty());
  CHECK(res.grid.occupied_count() > 0);
  // Surface only: the center cell stays empty.
  CHECK(res.grid.at(8, 8, 8) == 0.0);
}

TEST_CASE("voxelize handles concave shapes") {
  const auto res = voxelize(make_l_prism(1.0, 1.0, 0.4, 1.0), 20);
  const double s = res.grid.voxel_size();
  const double expected = (1.0 * 0.4 + 0.4 * 0.6) * 1.0 / (s * s * s);
  CHECK(std::abs(res.grid.occupied_count() - expected) / expected < 0.05);
}

TEST_CASE("marching cubes trivial cases") {
  VoxelGrid empty(8, Vec3::Zero(), 1.0);
  CHECK(marching_cubes(empty).empty());
  VoxelGrid full = empty;
  for (double& v : full.values()) v = 1.0;
  CHECK(marching_cubes(full).empty());
  VoxelGrid single = empty;
  single.set(3, 4, 5, 1.0);
  const TriangleMesh m = marching_cubes(single);
  CHECK_FALSE(m.empty());
  CHECK(m.is_watertight());
  CHECK(m.is_consistently_oriented());
  CHECK(m.signed_volume() > 0.0);
  CHECK_THROWS_AS(marching_cubes(VoxelGrid(1, Vec3::Zero(), 1.0)), DataError);
  CHECK_THROWS_AS(marching_cubes(single, 1.0), DataError);
}

TEST_CASE("marching cubes sphere matches analytic area and volume") {
  const double r = 20.0;
  const VoxelGrid g = rasterized_sphere(48, Vec3::Constant(24.0), r);
  const TriangleMesh m = marching_cubes(g);
  CHECK(m.is_watertight());
  CHECK(m.is_consistently_oriented());
  const double area = 4.0 * kPi * r * r, volume = 4.0 / 3.0 * kPi * r * r * r;
  CHECK(std::abs(m.surface_area() - area) / area < 0.10);
  CHECK(std::abs(m.signed_volume() - volume) / volume < 0.05);
}

TEST_CASE("marching cubes output is watertight and oriented on random grids") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    VoxelGrid g(10, Vec3(rng.uniform(), 0.0, -1.0), 0.5);
    const bool binary = trial % 2 == 0;
    for (std::uint32_t z = 0; z < 10; ++z)
      for (std::uint32_t y = 0; y < 10; ++y)
        for (std::uint32_t x = 0; x < 10; ++x) {
          const double u = rng.uniform();
          g.set(x, y, z, binary ? (u < 0.45 ? 1.0 : 0.0) : u);
        }
    const TriangleMesh m = marching_cubes(g);
    CHECK_NOTHROW(m.validate());
    CHECK(m.is_watertight());
    CHECK(m.is_consistently_oriented());
    CHECK(m.signed_volume() > 0.0);
  }
}

TEST_CASE("HC smoothing keeps a flat patch fixed") {
  TriangleMesh patch;
  const int n = 8;
  for (int y = 0; y <= n; ++y)
    for (int x = 0; x <= n; ++x) patch.vertices.emplace_back(0.1 * x, 0.1 * y, 0.0);
  auto id = [&](int x, int y) { return static_cast<std::uint32_t>(y * (n + 1) + x); };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      patch.faces.push_back({id(x, y), id(x + 1, y), id(x + 1, y + 1)});
      patch.faces.push_back({id(x, y), id(x + 1, y + 1), id(x, y + 1)});
    }
  const TriangleMesh out = smooth_mesh(patch);
  CHECK(max_vertex_error(patch, out) < 1e-9);
  CHECK(smooth_mesh(patch, {0, 0.0, 0.5}).vertices == patch.vertices);
}

TEST_CASE("HC smoothing limits shrinkage on a marching-cubes sphere") {
  const TriangleMesh m = marching_cubes(rasterized_sphere(48, Vec3::Constant(24.0), 20.0));
  const TriangleMesh hc = smooth_mesh(m);
  const TriangleMesh plain = laplacian_smooth(m, 10);
  CHECK(hc.vertices.size() == m.vertices.size());
  CHECK(hc.faces == m.faces);
  const double v0 = m.signed_volume();
  const double hc_shrink = (v0 - hc.signed_volume()) / v0;
  const double plain_shrink = (v0 - plain.signed_volume()) / v0;
  CHECK(std::abs(hc_shrink) < 0.05);
  CHECK(std::abs(hc_shrink) < std::abs(plain_shrink));
}

TEST_CASE("completeness by definition") {
  VoxelGrid g(20, Vec3::Zero(), 1.0);
  fill_block(g, 2, 2, 2, 10, 10, 10);
  auto rep = completeness(g);
  CHECK(rep.cluster_count == 1);
  CHECK(rep.major_cluster_size == 1000);
  CHECK(rep.outlier_percentage == 0.0);

  VoxelGrid two(20, Vec3::Zero(), 1.0);
  fill_block(two, 1, 1, 1, 5, 6, 3);    // 90
  fill_block(two, 12, 12, 12, 5, 2, 1);  // 10
  rep = completeness(two);
  CHECK(rep.cluster_count == 2);
  CHECK(rep.major_cluster_size == 90);
  CHECK(rep.outlier_percentage == doctest::Approx(10.0).epsilon(1e-12));

  // Isolated voxels are noise and count as outliers.
  VoxelGrid noisy = g;
  noisy.set(17, 17, 17, 1.0);
  rep = completeness(noisy);
  CHECK(rep.cluster_count == 1);
  CHECK(rep.outlier_percentage == doctest::Approx(100.0 / 1001.0).epsilon(1e-12));

  CHECK_THROWS_AS(completeness(VoxelGrid(4, Vec3::Zero(), 1.0)), DataError);
}

TEST_CASE("completeness major cluster matches a connected-component oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const VoxelGrid g = random_blobs(rng, 20, 6);
    // Radius 1.8 reaches exactly the 26-neighborhood; with min-points 1 DBSCAN
    // clusters are the connected components.
    CHECK(completeness(g, {1.8, 1}).major_cluster_size == largest_component_oracle(g));
    // Solid blobs have core points everywhere, so the default min-points agrees too.
    CHECK(completeness(g).major_cluster_size == largest_component_oracle(g));
  }
}

TEST_CASE("completeness is invariant under translation and axis permutation") {
  Rng rng(23);
  for (int trial = 0; trial < 6; ++trial) {
    VoxelGrid g = random_blobs(rng, 16, 5);
    for (int k = 0; k < 20; ++k) g.set(rng.below(16), rng.below(16), rng.below(16), 1.0);
    const auto base = completeness(g);
    VoxelGrid moved(20, Vec3::Zero(), 1.0), permuted(16, Vec3::Zero(), 1.0);
    for (std::uint32_t z = 0; z < 16; ++z)
      for (std::uint32_t y = 0; y < 16; ++y)
        for (std::uint32_t x = 0; x < 16; ++x) {
          moved.set(x + 3, y + 1, z + 2, g.at(x, y, z));
          permuted.set(z, x, y, g.at(x, y, z));
        }
    CHECK(completeness(moved).outlier_percentage == base.outlier_percentage);
    CHECK(completeness(permuted).outlier_percentage == base.outlier_percentage);
  }
}

TEST_CASE("PCA of centered 2D data is a rotation") {
  Rng rng(4);
  std::vector<std::vector<double>> pts(30, std::vector<double>(2));
  for (auto& p : pts) p = {rng.normal(0.0, 2.0), rng.normal(0.0, 0.5)};
  double mx = 0, my = 0;
  for (auto& p : pts) mx += p[0], my += p[1];
  for (auto& p : pts) p[0] -= mx / 30, p[1] -= my / 30;
  const auto res = pca_project(pts, 2);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double d0 = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
      const double d1 = (res.projection.row(i) - res.projection.row(j)).norm();
      CHECK(std::abs(d0 - d1) < 1e-9);
    }
}

TEST_CASE("PCA of collinear points has no second-component variance") {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({1.0 + i, 2.0 - 0.5 * i, 0.25 * i});
  const auto res = pca_project(pts, 2);
  CHECK(res.projection.col(1).squaredNorm() < 1e-20);
  CHECK(res.eigenvalues[1] < 1e-12);
  CHECK_THROWS_AS(pca_project({{1.0, 2.0}}, 2), DataError);
  CHECK_THROWS_AS(pca_project({{1.0, 2.0}, {1.0}}, 1), DimensionError);
}

TEST_CASE("PCA reconstruction error equals the trailing eigenvalues") {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::vector<double>> pts(40, std::vector<double>(6));
    for (auto& p : pts)
      for (std::size_t j = 0; j < 6; ++j) p[j] = rng.normal(0.0, 1.0 + j);
    const auto res = pca_project(pts, 2);
    // Residual sum of squares, normalized like the covariance.
    double residual = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Eigen::VectorXd x(6);
      for (int j = 0; j < 6; ++j) x[j] = pts[i][j] - res.mean[j];
      const Eigen::VectorXd back = res.components * res.projection.row(i).transpose();
      residual += (x - back).squaredNorm();
    }
    residual /= static_cast<double>(pts.size() - 1);
    double trailing = 0.0;
    for (int j = 2; j < 6; ++j) trailing += res.eigenvalues[j];
    CHECK(std::abs(residual - trailing) < 1e-8);
  }
}

TEST_CASE("toy shapes are closed, deterministic and cover every kind") {
  const auto corpus = make_toy_corpus(12, 5);
  REQUIRE(corpus.size() == 12);
  std::vector<int> seen(kToyKindCount, 0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus[i];
    ++seen[static_cast<int>(s.kind)];
    CHECK(s.mesh.is_consistently_oriented());
    CHECK(s.mesh.signed_volume() > 0.0);
    const double longest = s.mesh.bounds().extent().maxCoeff();
    CHECK(longest >= 0.02);
    CHECK(longest <= 0.2);
    CHECK(s.mesh.bounds().center().norm() < 1e-12);
    CHECK(s.id.find(toy_kind_name(s.kind)) != std::string::npos);
    const auto again = make_toy_shape(i, 5);
    CHECK(again.mesh.vertices == s.mesh.vertices);
  }
  for (int k = 0; k < kToyKindCount; ++k) CHECK(seen[static_cast<std::size_t>(k)] == 2);
  CHECK(make_toy_shape(3, 6).mesh.vertices != corpus[3].mesh.vertices);
  const auto upright = make_toy_shape(0, 5, false);
  CHECK(upright.mesh.bounds().extent().x() > 0.0);
}
