#pragma once

#include <Eigen/Core>

#include <vector>

namespace graspforge::geometry {

struct PcaResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;   // one principal direction per column
  Eigen::VectorXd eigenvalues;  // sample covariance spectrum, descending, full length
  Eigen::MatrixXd projection;   // one row per input vector
};

/// Projects vectors onto their top principal components. The covariance uses
/// the n - 1 normalization; each direction's largest-magnitude entry is made
/// positive so the signs are reproducible. Needs at least two vectors of one length.
PcaResult pca_project(const std::vector<std::vector<double>>& vectors, int components = 2);

}  // namespace graspforge::geometry
