#include "graspforge/geometry/pca.hpp"

#include <Eigen/Eigenvalues>

#include <string>

#include "graspforge/core/error.hpp"

namespace graspforge::geometry {

PcaResult pca_project(const std::vector<std::vector<double>>& vectors, int components) {
  if (vectors.size() < 2) throw DataError("PCA needs at least two vectors");
  const auto n = static_cast<Eigen::Index>(vectors.size());
  const auto d = static_cast<Eigen::Index>(vectors.front().size());
  if (d == 0) throw DimensionError("PCA of zero-length vectors");
  if (components < 1 || components > d)
    throw DimensionError("cannot take " + std::to_string(components) + " components of " + std::to_string(d) +
                         "-dimensional vectors");
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(vectors[i].size()) != d)
      throw DimensionError("PCA input vectors differ in length");
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = vectors[i][j];
  }
  PcaResult out;
  out.mean = x.colwise().mean().transpose();
  x.rowwise() -= out.mean.transpose();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigen sorts ascending; reverse to descending.
  out.eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
  Eigen::MatrixXd vecs = solver.eigenvectors().rowwise().reverse();
  out.components = vecs.leftCols(components);
  for (Eigen::Index c = 0; c < components; ++c) {
    Eigen::Index arg = 0;
    out.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (out.components(arg, c) < 0.0) out.components.col(c) *= -1.0;
  }
  out.projection = x * out.components;
  return out;
}

}  // namespace graspforge::geometry
