#pragma once

#include "gridscope/point_cloud.hpp"
#include "gridscope/split_diffuse.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testing_support {

inline std::string point_id(std::size_t i) {
  std::string s = std::to_string(i);
  return "p" + std::string(6 - std::min<std::size_t>(6, s.size()), '0') + s;
}

// Gaussian blobs, optionally with coordinates snapped to a coarse set so that
// duplicates occur along every axis.
inline gridscope::PointCloud random_cloud(std::size_t n, std::size_t dims, std::uint64_t seed,
                                          bool with_duplicates = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> blob(0, 3);
  std::vector<std::vector<double>> centers(4, std::vector<double>(dims));
  for (auto& c : centers)
    for (auto& v : c) v = 4.0 * normal(rng);

  std::vector<gridscope::Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centers[static_cast<std::size_t>(blob(rng))];
    std::vector<double> coords(dims);
    for (std::size_t a = 0; a < dims; ++a) {
      coords[a] = c[a] + normal(rng);
      if (with_duplicates) coords[a] = std::round(coords[a]);
    }
    pts.push_back({point_id(i), std::move(coords)});
  }
  return gridscope::PointCloud(dims, std::move(pts));
}

inline gridscope::PointCloud grid_as_cloud(const gridscope::sd::GridAssignment& asg) {
  std::vector<gridscope::Point> pts;
  for (const auto& [id, cell] : asg.cells) pts.push_back({id, std::vector<double>(cell.begin(), cell.end())});
  return gridscope::PointCloud(asg.shape.dims(), std::move(pts));
}

inline bool is_bijection(const gridscope::sd::GridAssignment& asg) {
  std::set<std::vector<int>> seen;
  for (const auto& [id, cell] : asg.cells) {
    if (!asg.shape.contains(cell)) return false;
    if (!seen.insert(cell).second) return false;
  }
  return seen.size() == asg.shape.volume();
}

// Uniformly random one-to-one placement of the cloud's ids on `shape`.
inline gridscope::sd::GridAssignment random_bijection(const gridscope::PointCloud& cloud,
                                                      const gridscope::sd::GridShape& shape, std::mt19937_64& rng) {
  std::vector<std::size_t> order(shape.volume());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  gridscope::sd::GridAssignment asg{shape, {}, {}};
  for (std::size_t i = 0; i < cloud.size(); ++i) asg.cells[cloud[i].id] = shape.cell_at(order[i]);
  return asg;
}

}  // namespace testing_support
