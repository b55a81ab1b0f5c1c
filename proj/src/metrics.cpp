#include "gridscope/metrics.hpp"

#include "gridscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gridscope::metrics {

namespace {

constexpr const char* kModule = "metrics";

void require_same_ids(const PointCloud& original, const sd::GridAssignment& assignment) {
  if (original.size() != assignment.cells.size()) {
    throw InputError(kModule, "id mismatch: cloud has " + std::to_string(original.size()) + " points, assignment " +
                                  std::to_string(assignment.cells.size()));
  }
  for (const auto& p : original.points()) {
    if (!assignment.cells.contains(p.id)) throw InputError(kModule, "id mismatch: '" + p.id + "' is not assigned");
  }
  if (original.dims() != assignment.shape.dims()) throw InputError(kModule, "cloud and grid dims differ");
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::size_t overlap_count(const PointCloud& cloud, double radius) {
  if (!(radius >= 0.0)) throw InputError(kModule, "overlap radius must be nonnegative");
  const std::size_t n = cloud.size();
  if (n < 2) return 0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return cloud[i].coords[0] < cloud[j].coords[0]; });

  const double r2 = radius * radius;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < n; ++a) {
    const auto& p = cloud[order[a]].coords;
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& q = cloud[order[b]].coords;
      if (q[0] - p[0] > radius) break;
      double d2 = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) d2 += (p[k] - q[k]) * (p[k] - q[k]);
      if (d2 <= r2) ++pairs;
    }
  }
  return pairs;
}

double density_heterogeneity(const PointCloud& cloud, int bins_per_axis) {
  std::vector<int> bins(cloud.dims(), bins_per_axis);
  return density_heterogeneity(cloud, bins);
}

double density_heterogeneity(const PointCloud& cloud, std::span<const int> bins) {
  if (cloud.empty()) throw InputError(kModule, "density heterogeneity of an empty cloud");
  if (bins.size() != cloud.dims()) throw InputError(kModule, "need one bin count per axis");
  std::size_t total = 1;
  for (int b : bins) {
    if (b < 1) throw InputError(kModule, "bins per axis must be at least 1");
    total *= static_cast<std::size_t>(b);
  }

  const std::size_t dims = cloud.dims();
  std::vector<double> lo(dims), width(dims);
  for (std::size_t a = 0; a < dims; ++a) {
    const auto col = cloud.column(a);
    auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    lo[a] = *mn;
    width[a] = *mx - *mn;
    if (width[a] <= 0.0) {
      const double pad = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(*mn));
      lo[a] = *mn - pad;
      width[a] = 2.0 * pad;
    }
  }

  std::vector<std::size_t> counts(total, 0);
  for (const auto& p : cloud.points()) {
    std::size_t index = 0;
    for (std::size_t a = dims; a-- > 0;) {
      const auto b = static_cast<std::size_t>(bins[a]);
      auto k = static_cast<std::size_t>(std::floor((p.coords[a] - lo[a]) / width[a] * static_cast<double>(b)));
      index = index * b + std::min(k, b - 1);
    }
    ++counts[index];
  }

  const double mean = static_cast<double>(cloud.size()) / static_cast<double>(total);
  double var = 0.0;
  for (std::size_t c : counts) var += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
  var /= static_cast<double>(total);
  return std::sqrt(var) / mean;
}

double topology_agreement(const PointCloud& original, const sd::GridAssignment& assignment) {
  require_same_ids(original, assignment);
  const std::size_t n = original.size();
  std::vector<const sd::Cell*> cells(n);
  for (std::size_t i = 0; i < n; ++i) cells[i] = &assignment.cells.at(original[i].id);

  std::size_t compared = 0;
  std::size_t agreed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t a = 0; a < original.dims(); ++a) {
        const int before = sign(original[i].coords[a] - original[j].coords[a]);
        if (before == 0) continue;
        ++compared;
        if (before == sign(static_cast<double>((*cells[i])[a] - (*cells[j])[a]))) ++agreed;
      }
    }
  }
  return compared == 0 ? 1.0 : static_cast<double>(agreed) / static_cast<double>(compared);
}

std::optional<double> geometry_correlation(const PointCloud& original, const sd::GridAssignment& assignment) {
  require_same_ids(original, assignment);
  const std::size_t n = original.size();
  if (n < 3) throw InputError(kModule, "geometry correlation needs at least 3 points");

  std::vector<const sd::Cell*> cells(n);
  for (std::size_t i = 0; i < n; ++i) cells[i] = &assignment.cells.at(original[i].id);

  // Two passes: means, then centered sums.
  const std::size_t pairs = n * (n - 1) / 2;
  std::vector<double> xs, ys;
  xs.reserve(pairs);
  ys.reserve(pairs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dx = 0.0, dy = 0.0;
      for (std::size_t a = 0; a < original.dims(); ++a) {
        const double u = original[i].coords[a] - original[j].coords[a];
        const double v = static_cast<double>((*cells[i])[a] - (*cells[j])[a]);
        dx += u * u;
        dy += v * v;
      }
      xs.push_back(std::sqrt(dx));
      ys.push_back(std::sqrt(dy));
    }
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(pairs);
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(pairs);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  // Spread at rounding-noise level relative to the distances counts as none.
  auto flat = [pairs](double ss, double mean) { return ss <= 1e-20 * static_cast<double>(pairs) * mean * mean; };
  if (flat(sxx, mx) || flat(syy, my)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

PointCloud grid_cloud(const sd::GridAssignment& assignment) {
  std::vector<Point> pts;
  pts.reserve(assignment.cells.size());
  for (const auto& [id, cell] : assignment.cells) pts.push_back({id, std::vector<double>(cell.begin(), cell.end())});
  return PointCloud(assignment.shape.dims(), std::move(pts));
}

LayoutScore score_layout(const PointCloud& original, const sd::GridAssignment& assignment, double grid_radius) {
  const PointCloud grid = grid_cloud(assignment);
  LayoutScore s;
  s.overlap_pairs = overlap_count(grid, grid_radius);
  s.heterogeneity = density_heterogeneity(grid, assignment.shape.sides());
  s.topology_agreement = topology_agreement(original, assignment);
  s.geometry_correlation = original.size() >= 3 ? geometry_correlation(original, assignment) : std::nullopt;
  return s;
}

LayoutScore score_cloud(const PointCloud& cloud, double radius, std::span<const int> bins) {
  LayoutScore s;
  s.overlap_pairs = overlap_count(cloud, radius);
  s.heterogeneity = density_heterogeneity(cloud, bins);
  s.topology_agreement = 1.0;
  s.geometry_correlation = 1.0;
  return s;
}

}  // namespace gridscope::metrics
