#include "gridscope/point_cloud.hpp"

#include "gridscope/error.hpp"

#include <cmath>

namespace gridscope {

PointCloud::PointCloud(std::size_t dims, std::vector<Point> points)
    : dims_(dims), points_(std::move(points)) {
  if (dims_ == 0) throw InputError("point_cloud", "dims must be at least 1");
  index_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Point& p = points_[i];
    if (p.coords.size() != dims_) {
      throw InputError("point_cloud", "point '" + p.id + "' has " + std::to_string(p.coords.size()) +
                                          " coordinates, expected " + std::to_string(dims_));
    }
    for (double c : p.coords) {
      if (!std::isfinite(c)) throw InputError("point_cloud", "point '" + p.id + "' has a non-finite coordinate");
    }
    if (!index_.emplace(p.id, i).second) throw InputError("point_cloud", "duplicate point id '" + p.id + "'");
  }
}

std::optional<std::size_t> PointCloud::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Point& PointCloud::at(const std::string& id) const {
  auto i = index_of(id);
  if (!i) throw NotFoundError("point_cloud", "unknown point id '" + id + "'");
  return points_[*i];
}

std::vector<std::string> PointCloud::ids() const {
  std::vector<std::string> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.id);
  return out;
}

std::vector<double> PointCloud::column(std::size_t axis) const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.coords.at(axis));
  return out;
}

}  // namespace gridscope
