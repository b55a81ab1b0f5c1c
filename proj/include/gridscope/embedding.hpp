#pragma once

// Low-dimensional point clouds for split-diffuse: pairwise distances,
// classical (Torgerson) MDS and orthogonal Procrustes alignment.

#include "gridscope/point_cloud.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gridscope::embed {

struct HighDimVectors {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> vectors;

  std::size_t size() const noexcept { return ids.size(); }
  void validate() const;
};

// Symmetric, zero-diagonal, nonnegative. `ids` label rows and columns.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<std::string> ids, Eigen::MatrixXd values);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd values_;
};

enum class Metric { Euclidean, Cosine };

Metric parse_metric(const std::string& name);

DistanceMatrix pairwise_distances(const HighDimVectors& v, Metric metric);
DistanceMatrix pairwise_distances(const PointCloud& cloud);

struct MdsResult {
  PointCloud cloud;
  // Top eigenvalues of the double-centered matrix, descending, clamped at 0.
  std::vector<double> eigenvalues;
  std::vector<std::string> warnings;
};

// Each output axis is oriented so that, among the points with the largest
// |coordinate| on it, the one with the smallest id is nonnegative.
MdsResult classical_mds(const DistanceMatrix& d, int target_dims);

struct ProcrustesResult {
  PointCloud aligned;
  double rmse = 0.0;
};

// Rotates/reflects and translates `b` onto `a` (no scaling). Points are
// matched by id; the aligned cloud keeps `a`'s point order.
ProcrustesResult procrustes_align(const PointCloud& a, const PointCloud& b);

}  // namespace gridscope::embed
