#pragma once

// Layout quality scores: how much an embedding overlaps and clumps, and how
// well a grid assignment keeps the original order and geometry.

#include "gridscope/point_cloud.hpp"
#include "gridscope/split_diffuse.hpp"

#include <optional>
#include <span>

namespace gridscope::metrics {

struct LayoutScore {
  std::size_t overlap_pairs = 0;
  double heterogeneity = 0.0;
  double topology_agreement = 1.0;
  // Empty when either distance list has zero variance.
  std::optional<double> geometry_correlation;
};

// Unordered pairs at Euclidean distance <= radius.
std::size_t overlap_count(const PointCloud& cloud, double radius);

// Coefficient of variation (population stddev / mean) of bin counts over a
// uniform binning of the cloud's bounding box. Zero-width axes are padded.
double density_heterogeneity(const PointCloud& cloud, int bins_per_axis);
double density_heterogeneity(const PointCloud& cloud, std::span<const int> bins);

// Fraction of per-axis comparisons, over point pairs strictly ordered in the
// original on that axis, whose order survives in the grid cells. Returns 1
// when no pair is strictly ordered on any axis.
double topology_agreement(const PointCloud& original, const sd::GridAssignment& assignment);

// Pearson correlation between original and grid pairwise distances.
std::optional<double> geometry_correlation(const PointCloud& original, const sd::GridAssignment& assignment);

// Lattice cells as a point cloud (same ids).
PointCloud grid_cloud(const sd::GridAssignment& assignment);

// Overlap and heterogeneity are measured on the grid (cells of unit spacing,
// bins = grid sides); the order scores compare it with `original`.
LayoutScore score_layout(const PointCloud& original, const sd::GridAssignment& assignment, double grid_radius = 0.5);

// Overlap and heterogeneity of a raw embedding, for side-by-side reporting.
LayoutScore score_cloud(const PointCloud& cloud, double radius, std::span<const int> bins);

}  // namespace gridscope::metrics
