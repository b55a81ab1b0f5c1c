#include "gridscope/split_diffuse.hpp"

#include "gridscope/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace gridscope::sd {

namespace {

constexpr const char* kModule = "split_diffuse";

// Half-open span of cells [lo[a], hi[a]) per axis.
struct CellBox {
  std::vector<int> lo;
  std::vector<int> hi;

  int span(std::size_t axis) const { return hi[axis] - lo[axis]; }

  std::size_t volume() const {
    std::size_t v = 1;
    for (std::size_t a = 0; a < lo.size(); ++a) v *= static_cast<std::size_t>(span(a));
    return v;
  }
};

CellBox full_box(const GridShape& shape) {
  return CellBox{std::vector<int>(shape.dims(), 0), shape.sides()};
}

// Only called on boxes with volume > 1, so some axis has span > 1.
std::size_t split_axis(const CellBox& box, std::size_t depth) {
  const std::size_t dims = box.lo.size();
  for (std::size_t k = 0; k < dims; ++k) {
    const std::size_t axis = (depth + k) % dims;
    if (box.span(axis) > 1) return axis;
  }
  return dims;
}

std::pair<CellBox, CellBox> split_box(const CellBox& box, std::size_t axis) {
  CellBox left = box;
  CellBox right = box;
  const int mid = box.lo[axis] + box.span(axis) / 2;
  left.hi[axis] = mid;
  right.lo[axis] = mid;
  return {std::move(left), std::move(right)};
}

class Splitter {
 public:
  Splitter(const PointCloud& cloud, const GridShape& shape)
      : cloud_(cloud), order_(cloud.size()), paths_(cloud.size()), cells_(cloud.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    for (auto& p : paths_) p.reserve(32);
    run(full_box(shape), 0, cloud.size(), 0);
  }

  GridAssignment result(const GridShape& shape) && {
    GridAssignment out;
    out.shape = shape;
    for (std::size_t i = 0; i < cloud_.size(); ++i) {
      const std::string& id = cloud_[i].id;
      out.cells.emplace(id, std::move(cells_[i]));
      out.paths.emplace(id, SplitPath(std::move(paths_[i])));
    }
    return out;
  }

 private:
  bool precedes(std::size_t axis, std::size_t i, std::size_t j) const {
    const auto& a = cloud_[i].coords;
    const auto& b = cloud_[j].coords;
    if (a[axis] != b[axis]) return a[axis] < b[axis];
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (k == axis) continue;
      if (a[k] != b[k]) return a[k] < b[k];
    }
    return cloud_[i].id < cloud_[j].id;
  }

  void run(const CellBox& box, std::size_t begin, std::size_t end, std::size_t depth) {
    if (end - begin == 1) {
      cells_[order_[begin]] = box.lo;
      return;
    }
    const std::size_t axis = split_axis(box, depth);
    auto [left, right] = split_box(box, axis);
    const std::size_t capacity = left.volume();

    auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
    auto nth = first + static_cast<std::ptrdiff_t>(capacity);
    auto last = order_.begin() + static_cast<std::ptrdiff_t>(end);
    std::nth_element(first, nth, last, [&](std::size_t i, std::size_t j) { return precedes(axis, i, j); });

    for (auto it = first; it != nth; ++it) paths_[*it].push_back(static_cast<char>(Side::Left));
    for (auto it = nth; it != last; ++it) paths_[*it].push_back(static_cast<char>(Side::Right));

    run(left, begin, begin + capacity, depth + 1);
    run(right, begin + capacity, end, depth + 1);
  }

  const PointCloud& cloud_;
  std::vector<std::size_t> order_;
  std::vector<std::string> paths_;
  std::vector<Cell> cells_;
};

}  // namespace

GridShape::GridShape(std::vector<int> sides) : sides_(std::move(sides)) {
  if (sides_.empty()) throw InputError(kModule, "grid shape needs at least one axis");
  for (int s : sides_) {
    if (s < 1) throw InputError(kModule, "grid sides must be positive, got " + std::to_string(s));
  }
}

GridShape GridShape::parse(std::string_view text) {
  std::vector<int> sides;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = std::min(text.find_first_of("xX", pos), text.size());
    const std::string_view part = text.substr(pos, next - pos);
    int value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw InputError(kModule, "cannot parse grid shape '" + std::string(text) + "'");
    }
    sides.push_back(value);
    pos = next + 1;
  }
  return GridShape(std::move(sides));
}

std::size_t GridShape::volume() const noexcept {
  std::size_t v = sides_.empty() ? 0 : 1;
  for (int s : sides_) v *= static_cast<std::size_t>(s);
  return v;
}

std::string GridShape::to_string() const {
  std::string out;
  for (std::size_t a = 0; a < sides_.size(); ++a) {
    if (a) out += 'x';
    out += std::to_string(sides_[a]);
  }
  return out;
}

bool GridShape::contains(const Cell& cell) const {
  if (cell.size() != sides_.size()) return false;
  for (std::size_t a = 0; a < cell.size(); ++a) {
    if (cell[a] < 0 || cell[a] >= sides_[a]) return false;
  }
  return true;
}

std::size_t GridShape::linear_index(const Cell& cell) const {
  if (!contains(cell)) throw InputError(kModule, "cell outside grid " + to_string());
  std::size_t index = 0;
  for (std::size_t a = sides_.size(); a-- > 0;) index = index * static_cast<std::size_t>(sides_[a]) + cell[a];
  return index;
}

Cell GridShape::cell_at(std::size_t linear) const {
  if (linear >= volume()) throw InputError(kModule, "cell index out of range for grid " + to_string());
  Cell cell(sides_.size());
  for (std::size_t a = 0; a < sides_.size(); ++a) {
    cell[a] = static_cast<int>(linear % static_cast<std::size_t>(sides_[a]));
    linear /= static_cast<std::size_t>(sides_[a]);
  }
  return cell;
}

GridShape balanced_shape(std::size_t n, std::size_t dims) {
  if (n == 0 || dims == 0) throw InputError(kModule, "balanced_shape needs n >= 1 and dims >= 1");
  std::vector<int> sides;
  std::size_t remaining = n;
  for (std::size_t left = dims; left > 0; --left) {
    if (left == 1) {
      sides.push_back(static_cast<int>(remaining));
      break;
    }
    // Smallest side s with s^left >= remaining that divides it.
    std::size_t s = 1;
    auto pow_at_least = [&](std::size_t base) {
      std::size_t p = 1;
      for (std::size_t k = 0; k < left; ++k) {
        p *= base;
        if (p >= remaining) return true;
      }
      return p >= remaining;
    };
    while (!pow_at_least(s)) ++s;
    while (remaining % s != 0) ++s;
    sides.push_back(static_cast<int>(s));
    remaining /= s;
  }
  std::sort(sides.begin(), sides.end(), std::greater<>());
  return GridShape(std::move(sides));
}

SplitPath::SplitPath(std::string steps) : steps_(std::move(steps)) {
  for (char c : steps_) {
    if (c != 'L' && c != 'R') throw InputError(kModule, "split path may only contain 'L' and 'R'");
  }
}

GridAssignment split_diffuse(const PointCloud& cloud, const GridShape& shape) {
  if (cloud.empty()) throw InputError(kModule, "point cloud is empty");
  if (shape.dims() != cloud.dims()) {
    throw InputError(kModule, "grid " + shape.to_string() + " has " + std::to_string(shape.dims()) +
                                  " axes but the cloud is " + std::to_string(cloud.dims()) + "-dimensional");
  }
  if (shape.volume() != cloud.size()) {
    throw InputError(kModule, "size mismatch: " + std::to_string(cloud.size()) + " points cannot fill grid " +
                                  shape.to_string() + " of " + std::to_string(shape.volume()) + " cells");
  }
  return Splitter(cloud, shape).result(shape);
}

Cell resolve_cell(const SplitPath& path, const GridShape& shape) {
  if (shape.dims() == 0) throw InputError(kModule, "grid shape has no axes");
  CellBox box = full_box(shape);
  for (std::size_t depth = 0; depth < path.size(); ++depth) {
    if (box.volume() == 1) {
      throw InputError(kModule, "path '" + path.str() + "' continues past a leaf at depth " +
                                    std::to_string(depth) + " (degenerate split)");
    }
    auto [left, right] = split_box(box, split_axis(box, depth));
    box = path[depth] == Side::Left ? std::move(left) : std::move(right);
  }
  if (box.volume() != 1) {
    throw InputError(kModule, "path '" + path.str() + "' ends before reaching a single cell of grid " +
                                  shape.to_string());
  }
  return box.lo;
}

std::map<std::string, int> sd_1d(std::span<const std::pair<std::string, double>> values) {
  if (values.empty()) throw InputError(kModule, "sd_1d needs at least one value");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const auto& [id, v] : values) {
    if (!std::isfinite(v)) throw InputError(kModule, "non-finite value for '" + id + "'");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (values[i].second != values[j].second) return values[i].second < values[j].second;
    return values[i].first < values[j].first;
  });
  std::map<std::string, int> ranks;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (!ranks.emplace(values[order[r]].first, static_cast<int>(r)).second) {
      throw InputError(kModule, "duplicate id '" + values[order[r]].first + "'");
    }
  }
  return ranks;
}

}  // namespace gridscope::sd
