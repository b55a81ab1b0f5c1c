#pragma once

// Split-diffuse layout: maps a point cloud bijectively onto an integer
// lattice by recursive capacity-balanced median splits.

#include "gridscope/point_cloud.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridscope::sd {

using Cell = std::vector<int>;

class GridShape {
 public:
  GridShape() = default;
  explicit GridShape(std::vector<int> sides);

  // Accepts "8x8", "4x4x4" or "16".
  static GridShape parse(std::string_view text);

  std::size_t dims() const noexcept { return sides_.size(); }
  const std::vector<int>& sides() const noexcept { return sides_; }
  int side(std::size_t axis) const { return sides_.at(axis); }
  std::size_t volume() const noexcept;
  std::string to_string() const;

  bool contains(const Cell& cell) const;
  // Row-major with axis 0 varying fastest.
  std::size_t linear_index(const Cell& cell) const;
  Cell cell_at(std::size_t linear) const;

  friend bool operator==(const GridShape&, const GridShape&) = default;

 private:
  std::vector<int> sides_;
};

// Most balanced shape with `dims` axes whose volume is exactly n.
// Sides are non-increasing, e.g. 12 points in 2D -> 4x3.
GridShape balanced_shape(std::size_t n, std::size_t dims);

enum class Side : char { Left = 'L', Right = 'R' };

// Sequence of left/right routing decisions from the root to a leaf.
class SplitPath {
 public:
  SplitPath() = default;
  explicit SplitPath(std::string steps);

  std::size_t size() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  Side operator[](std::size_t i) const { return static_cast<Side>(steps_[i]); }
  const std::string& str() const noexcept { return steps_; }
  void push(Side s) { steps_.push_back(static_cast<char>(s)); }

  friend bool operator==(const SplitPath&, const SplitPath&) = default;

 private:
  std::string steps_;
};

struct GridAssignment {
  GridShape shape;
  std::map<std::string, Cell> cells;
  std::map<std::string, SplitPath> paths;

  friend bool operator==(const GridAssignment&, const GridAssignment&) = default;
};

// Places every point of `cloud` on its own lattice cell of `shape`.
//
// Each recursion node owns a box of cells and exactly as many points as the
// box has cells. The node splits on axis (depth mod dims), skipping forward
// past axes of span 1; the left child takes floor(span / 2) columns along
// that axis and the points that sort first under the key
// (coord on the split axis, remaining coords in axis order, id).
// Throws InputError on size or dims mismatch.
GridAssignment split_diffuse(const PointCloud& cloud, const GridShape& shape);

// Replays the box recursion along `path` and returns the leaf cell.
// Throws InputError if the path ends early or runs past a leaf.
Cell resolve_cell(const SplitPath& path, const GridShape& shape);

// One-dimensional split-diffuse: the rank of each value under (value, id).
std::map<std::string, int> sd_1d(std::span<const std::pair<std::string, double>> values);

}  // namespace gridscope::sd
