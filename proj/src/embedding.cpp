#include "gridscope/embedding.hpp"

#include "gridscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gridscope::embed {

namespace {

constexpr const char* kModule = "embedding";

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_matrix(const PointCloud& cloud) {
  MatrixXd m(static_cast<Index>(cloud.size()), static_cast<Index>(cloud.dims()));
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t a = 0; a < cloud.dims(); ++a) m(static_cast<Index>(i), static_cast<Index>(a)) = cloud[i].coords[a];
  return m;
}

PointCloud from_matrix(const std::vector<std::string>& ids, const MatrixXd& m) {
  std::vector<Point> pts;
  pts.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<double> coords(static_cast<std::size_t>(m.cols()));
    for (Index a = 0; a < m.cols(); ++a) coords[static_cast<std::size_t>(a)] = m(static_cast<Index>(i), a);
    pts.push_back({ids[i], std::move(coords)});
  }
  return PointCloud(static_cast<std::size_t>(m.cols()), std::move(pts));
}

void orient_axes(const std::vector<std::string>& ids, MatrixXd& coords) {
  for (Index a = 0; a < coords.cols(); ++a) {
    const double peak = coords.col(a).cwiseAbs().maxCoeff();
    if (peak == 0.0) continue;
    const double cutoff = peak * (1.0 - 1e-9);
    Index pick = -1;
    for (Index i = 0; i < coords.rows(); ++i) {
      if (std::abs(coords(i, a)) < cutoff) continue;
      if (pick < 0 || ids[static_cast<std::size_t>(i)] < ids[static_cast<std::size_t>(pick)]) pick = i;
    }
    if (coords(pick, a) < 0.0) coords.col(a) = -coords.col(a);
  }
}

}  // namespace

void HighDimVectors::validate() const {
  if (ids.size() != vectors.size()) throw InputError(kModule, "vector count does not match id count");
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != vectors.front().size()) {
      throw InputError(kModule, "dimension mismatch: vector '" + ids[i] + "' has length " +
                                    std::to_string(vectors[i].size()) + ", expected " +
                                    std::to_string(vectors.front().size()));
    }
    for (double x : vectors[i]) {
      if (!std::isfinite(x)) throw InputError(kModule, "vector '" + ids[i] + "' has a non-finite entry");
    }
    if (!seen.emplace(ids[i], 0).second) throw InputError(kModule, "duplicate vector id '" + ids[i] + "'");
  }
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> ids, Eigen::MatrixXd values)
    : ids_(std::move(ids)), values_(std::move(values)) {
  const Index n = static_cast<Index>(ids_.size());
  if (values_.rows() != n || values_.cols() != n) throw InputError(kModule, "distance matrix must be n x n for n ids");
  std::map<std::string, int> seen;
  for (const auto& id : ids_)
    if (!seen.emplace(id, 0).second) throw InputError(kModule, "duplicate id '" + id + "' in distance matrix");
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double v = values_(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw InputError(kModule, "distance between '" + ids_[static_cast<std::size_t>(i)] + "' and '" +
                                      ids_[static_cast<std::size_t>(j)] + "' must be finite and nonnegative");
      }
      if (std::abs(v - values_(j, i)) > 1e-9 * std::max(1.0, v)) {
        throw InputError(kModule, "distance matrix is not symmetric at ('" + ids_[static_cast<std::size_t>(i)] +
                                      "', '" + ids_[static_cast<std::size_t>(j)] + "')");
      }
    }
    if (values_(i, i) > 1e-12) {
      throw InputError(kModule, "distance matrix has nonzero diagonal at '" + ids_[static_cast<std::size_t>(i)] + "'");
    }
  }
  values_ = 0.5 * (values_ + values_.transpose()).eval();
  values_.diagonal().setZero();
}

Metric parse_metric(const std::string& name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "cosine") return Metric::Cosine;
  throw InputError(kModule, "unknown metric '" + name + "' (expected euclidean or cosine)");
}

DistanceMatrix pairwise_distances(const HighDimVectors& v, Metric metric) {
  v.validate();
  if (v.size() < 2) throw InputError(kModule, "pairwise distances need at least 2 vectors");
  const std::size_t n = v.size();
  const Index dim = static_cast<Index>(v.vectors.front().size());
  MatrixXd x(static_cast<Index>(n), dim);
  for (std::size_t i = 0; i < n; ++i) x.row(static_cast<Index>(i)) = Eigen::Map<const VectorXd>(v.vectors[i].data(), dim);

  MatrixXd d = MatrixXd::Zero(static_cast<Index>(n), static_cast<Index>(n));
  if (metric == Metric::Cosine) {
    VectorXd norms = x.rowwise().norm();
    for (std::size_t i = 0; i < n; ++i) {
      if (norms(static_cast<Index>(i)) == 0.0) {
        throw InputError(kModule, "vector '" + v.ids[i] + "' is zero; cosine distance is undefined");
      }
    }
  }
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    for (Index j = i + 1; j < static_cast<Index>(n); ++j) {
      double dist = 0.0;
      if (metric == Metric::Euclidean) {
        dist = (x.row(i) - x.row(j)).norm();
      } else {
        const double cosine = x.row(i).dot(x.row(j)) / (x.row(i).norm() * x.row(j).norm());
        dist = std::max(0.0, 1.0 - cosine);
      }
      d(i, j) = d(j, i) = dist;
    }
  }
  return DistanceMatrix(v.ids, std::move(d));
}

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  HighDimVectors v;
  for (const auto& p : cloud.points()) {
    v.ids.push_back(p.id);
    v.vectors.push_back(p.coords);
  }
  return pairwise_distances(v, Metric::Euclidean);
}

MdsResult classical_mds(const DistanceMatrix& d, int target_dims) {
  if (target_dims < 1 || target_dims > 3) throw InputError(kModule, "target dims must be 1, 2 or 3");
  const Index n = static_cast<Index>(d.size());
  if (n <= target_dims) {
    throw InputError(kModule, "classical MDS into " + std::to_string(target_dims) + " dims needs more than " +
                                  std::to_string(target_dims) + " points, got " + std::to_string(n));
  }

  MdsResult result;
  const MatrixXd squared = d.values().cwiseProduct(d.values());
  const MatrixXd centering = MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const MatrixXd b = -0.5 * centering * squared * centering;

  // Eigenvalues come back ascending.
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) throw std::runtime_error("embedding: eigendecomposition failed");
  const VectorXd& evals = solver.eigenvalues();
  const double scale = std::max(std::abs(evals(0)), std::abs(evals(n - 1)));

  MatrixXd coords = MatrixXd::Zero(n, target_dims);
  for (int k = 0; k < target_dims; ++k) {
    const Index col = n - 1 - k;
    double lambda = evals(col);
    if (lambda < 0.0) {
      if (lambda < -1e-9 * scale) {
        result.warnings.push_back("eigenvalue " + std::to_string(k) + " is negative (" + std::to_string(lambda) +
                                  "); clamped to 0");
      }
      lambda = 0.0;
    }
    result.eigenvalues.push_back(lambda);
    coords.col(k) = solver.eigenvectors().col(col) * std::sqrt(lambda);
  }
  if (scale == 0.0) {
    result.warnings.push_back("all distances are zero; output coordinates are degenerate");
  } else if (evals(0) < -1e-9 * scale) {
    result.warnings.push_back("distances are not Euclidean (most negative eigenvalue " + std::to_string(evals(0)) +
                              ")");
  }

  coords.rowwise() -= coords.colwise().mean();
  orient_axes(d.ids(), coords);
  result.cloud = from_matrix(d.ids(), coords);
  return result;
}

ProcrustesResult procrustes_align(const PointCloud& a, const PointCloud& b) {
  if (a.dims() != b.dims()) throw InputError(kModule, "procrustes: clouds have different dims");
  if (a.size() != b.size()) throw InputError(kModule, "procrustes: clouds have different point counts");
  if (a.empty()) throw InputError(kModule, "procrustes: clouds are empty");

  const MatrixXd ma = to_matrix(a);
  MatrixXd mb(ma.rows(), ma.cols());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto j = b.index_of(a[i].id);
    if (!j) throw InputError(kModule, "procrustes: id '" + a[i].id + "' missing from second cloud");
    for (std::size_t k = 0; k < a.dims(); ++k) mb(static_cast<Index>(i), static_cast<Index>(k)) = b[*j].coords[k];
  }

  const Eigen::RowVectorXd mean_a = ma.colwise().mean();
  const Eigen::RowVectorXd mean_b = mb.colwise().mean();
  const MatrixXd ca = ma.rowwise() - mean_a;
  const MatrixXd cb = mb.rowwise() - mean_b;

  Eigen::JacobiSVD<MatrixXd> svd(cb.transpose() * ca, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const MatrixXd rotation = svd.matrixU() * svd.matrixV().transpose();
  const MatrixXd aligned = (cb * rotation).rowwise() + mean_a;

  ProcrustesResult out;
  out.rmse = std::sqrt((aligned - ma).squaredNorm() / static_cast<double>(a.size()));
  out.aligned = from_matrix(a.ids(), aligned);
  return out;
}

}  // namespace gridscope::embed
