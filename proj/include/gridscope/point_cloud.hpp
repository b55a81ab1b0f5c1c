#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gridscope {

struct Point {
  std::string id;
  std::vector<double> coords;
};

// A set of uniquely identified points sharing one dimensionality.
// Construction validates: equal coordinate lengths, unique ids, finite values.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dims, std::vector<Point> points);

  std::size_t dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }

  std::optional<std::size_t> index_of(const std::string& id) const;
  const Point& at(const std::string& id) const;

  std::vector<std::string> ids() const;
  std::vector<double> column(std::size_t axis) const;

 private:
  std::size_t dims_ = 0;
  std::vector<Point> points_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace gridscope
