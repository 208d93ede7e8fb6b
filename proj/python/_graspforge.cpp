// Python bindings. Meshes cross the boundary as (vertices [N,3], faces [M,3])
// numpy arrays, voxel grids as [R,R,R] arrays indexed [z, y, x].

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "graspforge/augment/selection.hpp"
#include "graspforge/core/digest.hpp"
#include "graspforge/core/error.hpp"
#include "graspforge/engine/checkpoint.hpp"
#include "graspforge/geometry/marching_cubes.hpp"
#include "graspforge/geometry/obj_io.hpp"
#include "graspforge/geometry/smoothing.hpp"
#include "graspforge/geometry/toy_shapes.hpp"
#include "graspforge/geometry/voxelize.hpp"
#include "graspforge/grasp/graspness.hpp"
#include "graspforge/grasp/rarity.hpp"
#include "graspforge/grasp/wrench_space.hpp"
#include "graspforge/model/ae_critic.hpp"
#include "graspforge/model/config.hpp"

namespace py = pybind11;
using namespace graspforge;
using geometry::TriangleMesh;
using geometry::Vec3;
using geometry::VoxelGrid;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IndexArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

TriangleMesh to_mesh(const Array& vertices, const IndexArray& faces) {
  if (vertices.ndim() != 2 || vertices.shape(1) != 3) throw py::value_error("vertices must have shape [N, 3]");
  if (faces.ndim() != 2 || faces.shape(1) != 3) throw py::value_error("faces must have shape [M, 3]");
  TriangleMesh m;
  auto v = vertices.unchecked<2>();
  for (py::ssize_t i = 0; i < v.shape(0); ++i) m.vertices.emplace_back(v(i, 0), v(i, 1), v(i, 2));
  auto f = faces.unchecked<2>();
  for (py::ssize_t i = 0; i < f.shape(0); ++i) {
    geometry::Face face;
    for (int k = 0; k < 3; ++k) {
      if (f(i, k) < 0 || f(i, k) >= v.shape(0)) throw py::value_error("face index out of range");
      face[k] = static_cast<std::uint32_t>(f(i, k));
    }
    m.faces.push_back(face);
  }
  return m;
}

py::tuple from_mesh(const TriangleMesh& m) {
  Array v({static_cast<py::ssize_t>(m.vertices.size()), py::ssize_t{3}});
  auto vv = v.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    for (int k = 0; k < 3; ++k) vv(i, k) = m.vertices[i][k];
  IndexArray f({static_cast<py::ssize_t>(m.faces.size()), py::ssize_t{3}});
  auto ff = f.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.faces.size(); ++i)
    for (int k = 0; k < 3; ++k) ff(i, k) = m.faces[i][k];
  return py::make_tuple(v, f);
}

Array grid_values(const VoxelGrid& g) {
  const auto r = static_cast<py::ssize_t>(g.resolution());
  Array out({r, r, r});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

VoxelGrid to_grid(const Array& values, const Vec3& origin, double voxel_size) {
  if (values.ndim() != 3 || values.shape(0) != values.shape(1) || values.shape(1) != values.shape(2))
    throw py::value_error("voxel values must be a cubic [R, R, R] array");
  const auto r = static_cast<std::uint32_t>(values.shape(0));
  return VoxelGrid(r, origin, voxel_size, std::vector<double>(values.data(), values.data() + values.size()));
}

Vec3 to_vec3(const std::vector<double>& v) {
  if (v.size() != 3) throw py::value_error("expected three coordinates");
  return {v[0], v[1], v[2]};
}

// A trained model loaded from a checkpoint and its sidecar.
class Model {
 public:
  explicit Model(const std::filesystem::path& checkpoint)
      : sidecar_(model::load_sidecar(checkpoint)), params_(engine::load_checkpoint(checkpoint)) {
    model::check_parameters(sidecar_.model, params_);
  }

  std::uint32_t resolution() const { return sidecar_.model.resolution; }
  std::uint32_t latent_dim() const { return sidecar_.model.latent_dim; }
  std::string stage() const { return sidecar_.stage; }

  model::LatentVector encode(const Array& values) const {
    return model::encode(sidecar_.model, params_, to_grid(values, Vec3::Zero(), 1.0 / resolution()));
  }
  Array decode(const model::LatentVector& z) const {
    if (z.size() != latent_dim()) throw py::value_error("latent has the wrong dimension");
    return grid_values(model::decode(sidecar_.model, params_, z));
  }
  double critic(const Array& values) const {
    return model::critic_score(sidecar_.model, params_, to_grid(values, Vec3::Zero(), 1.0 / resolution()));
  }

 private:
  model::ModelSidecar sidecar_;
  engine::ParameterSet params_;
};

}  // namespace

PYBIND11_MODULE(_graspforge, m) {
  m.doc() = "Grasp dataset augmentation core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  m.def("sha256_file", &sha256_file, py::arg("path"));

  m.def(
      "toy_shape",
      [](std::size_t index, std::uint64_t seed, bool random_orientation) {
        auto s = geometry::make_toy_shape(index, seed, random_orientation);
        py::tuple mesh = from_mesh(s.mesh);
        return py::make_tuple(s.id, geometry::toy_kind_name(s.kind), mesh[0], mesh[1]);
      },
      py::arg("index"), py::arg("seed"), py::arg("random_orientation") = true,
      "Returns (id, kind, vertices, faces) for one procedural shape.");

  m.def(
      "load_mesh", [](const std::filesystem::path& p) { return from_mesh(geometry::load_mesh(p)); },
      py::arg("path"));
  m.def(
      "save_mesh",
      [](const Array& v, const IndexArray& f, const std::filesystem::path& p) { geometry::save_mesh(to_mesh(v, f), p); },
      py::arg("vertices"), py::arg("faces"), py::arg("path"));
  m.def(
      "mesh_volume", [](const Array& v, const IndexArray& f) { return to_mesh(v, f).signed_volume(); },
      py::arg("vertices"), py::arg("faces"));
  m.def(
      "is_watertight", [](const Array& v, const IndexArray& f) { return to_mesh(v, f).is_watertight(); },
      py::arg("vertices"), py::arg("faces"));

  m.def(
      "voxelize",
      [](const Array& v, const IndexArray& f, std::uint32_t resolution) {
        auto r = geometry::voxelize(to_mesh(v, f), resolution);
        const Vec3& o = r.grid.origin();
        return py::make_tuple(grid_values(r.grid), std::vector<double>{o.x(), o.y(), o.z()}, r.grid.voxel_size());
      },
      py::arg("vertices"), py::arg("faces"), py::arg("resolution"),
      "Returns (values [R,R,R] indexed z,y,x, origin, voxel_size).");

  m.def(
      "marching_cubes",
      [](const Array& values, const std::vector<double>& origin, double voxel_size, double iso) {
        return from_mesh(geometry::marching_cubes(to_grid(values, to_vec3(origin), voxel_size), iso));
      },
      py::arg("values"), py::arg("origin") = std::vector<double>{0, 0, 0}, py::arg("voxel_size") = 1.0,
      py::arg("iso") = geometry::kDefaultIsoLevel);

  m.def(
      "smooth_mesh",
      [](const Array& v, const IndexArray& f, int iterations) {
        geometry::SmoothingParams p;
        p.iterations = iterations;
        return from_mesh(geometry::smooth_mesh(to_mesh(v, f), p));
      },
      py::arg("vertices"), py::arg("faces"), py::arg("iterations") = geometry::SmoothingParams{}.iterations);

  m.def(
      "rarity",
      [](const std::vector<std::vector<double>>& features, std::size_t k, double distance_floor) {
        return grasp::rarity(features, {k, distance_floor});
      },
      py::arg("features"), py::arg("k") = 5, py::arg("distance_floor") = 1e-9);

  m.def(
      "ferrari_canny",
      [](const std::vector<std::vector<double>>& points, const std::vector<std::vector<double>>& normals,
         const std::vector<double>& centroid, double friction, std::size_t cone_edges, double torque_scale,
         double patch_radius) {
        if (points.size() != normals.size()) throw py::value_error("points and normals differ in length");
        std::vector<grasp::Contact> contacts;
        for (std::size_t i = 0; i < points.size(); ++i)
          contacts.push_back({to_vec3(points[i]), to_vec3(normals[i]).normalized()});
        return grasp::ferrari_canny(contacts, to_vec3(centroid),
                                    {friction, cone_edges, torque_scale, patch_radius});
      },
      py::arg("points"), py::arg("normals"), py::arg("centroid") = std::vector<double>{0, 0, 0},
      py::arg("friction") = 0.5, py::arg("cone_edges") = 8, py::arg("torque_scale") = 1.0,
      py::arg("patch_radius") = 0.0, "Ferrari-Canny quality of a set of contacts with outward normals.");

  m.def(
      "graspness",
      [](const Array& v, const IndexArray& f, std::uint64_t seed, std::size_t samples) {
        grasp::GraspConfig config;
        config.samples_per_object = samples;
        return grasp::graspness(to_mesh(v, f), config, seed);
      },
      py::arg("vertices"), py::arg("faces"), py::arg("seed"), py::arg("samples") = 100);

  m.def("linear_percentile", &augment::linear_percentile, py::arg("values"), py::arg("percentile"));
  m.def("select_high_scoring", &augment::select_high_scoring, py::arg("scores"), py::arg("percentile"));

  m.def("interpolate", &model::interpolate, py::arg("z1"), py::arg("z2"), py::arg("alpha"));

  py::class_<Model>(m, "Model")
      .def(py::init<const std::filesystem::path&>(), py::arg("checkpoint"))
      .def_property_readonly("resolution", &Model::resolution)
      .def_property_readonly("latent_dim", &Model::latent_dim)
      .def_property_readonly("stage", &Model::stage)
      .def("encode", &Model::encode, py::arg("values"))
      .def("decode", &Model::decode, py::arg("latent"))
      .def("critic", &Model::critic, py::arg("values"));
}
