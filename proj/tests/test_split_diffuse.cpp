#include "doctest.h"

#include "gridscope/error.hpp"
#include "gridscope/split_diffuse.hpp"
#include "oracles/nested_rank_oracle.hpp"
#include "oracles/sidedness.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using gridscope::InputError;
using gridscope::Point;
using gridscope::PointCloud;
using namespace gridscope::sd;
using testing_support::grid_as_cloud;
using testing_support::is_bijection;
using testing_support::random_cloud;

namespace {

PointCloud lattice_cloud(const GridShape& shape, const std::vector<double>& scale, const std::vector<double>& offset) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < shape.volume(); ++i) {
    Cell c = shape.cell_at(i);
    std::vector<double> coords(c.size());
    for (std::size_t a = 0; a < c.size(); ++a) coords[a] = offset[a] + scale[a] * c[a];
    pts.push_back({testing_support::point_id(i), coords});
  }
  return PointCloud(shape.dims(), std::move(pts));
}

}  // namespace

TEST_CASE("already-uniform corners stay in place") {
  PointCloud cloud(2, {{"a", {0, 0}}, {"b", {1, 0}}, {"c", {0, 1}}, {"d", {1, 1}}});
  auto asg = split_diffuse(cloud, GridShape({2, 2}));
  CHECK(asg.cells.at("a") == Cell{0, 0});
  CHECK(asg.cells.at("b") == Cell{1, 0});
  CHECK(asg.cells.at("c") == Cell{0, 1});
  CHECK(asg.cells.at("d") == Cell{1, 1});
}

TEST_CASE("four scattered points split on x then y") {
  PointCloud cloud(2, {{"A", {0.1, 0.9}}, {"B", {0.2, 0.1}}, {"C", {0.9, 0.8}}, {"D", {0.8, 0.2}}});
  auto asg = split_diffuse(cloud, GridShape({2, 2}));
  CHECK(asg.cells.at("A") == Cell{0, 1});
  CHECK(asg.cells.at("B") == Cell{0, 0});
  CHECK(asg.cells.at("C") == Cell{1, 1});
  CHECK(asg.cells.at("D") == Cell{1, 0});
  CHECK(asg.paths.at("A").str() == "LR");
  CHECK(asg.paths.at("B").str() == "LL");
  CHECK(asg.paths.at("C").str() == "RR");
  CHECK(asg.paths.at("D").str() == "RL");
}

TEST_CASE("64 points fill an 8x8 lattice") {
  auto cloud = random_cloud(64, 2, 11);
  auto asg = split_diffuse(cloud, GridShape({8, 8}));
  CHECK(is_bijection(asg));
  for (const auto& [id, path] : asg.paths) CHECK(path.size() == 6);
}

TEST_CASE("resolve_cell decodes paths") {
  CHECK(resolve_cell(SplitPath("LL"), GridShape({2, 2})) == Cell{0, 0});
  CHECK(resolve_cell(SplitPath("RL"), GridShape({2, 2})) == Cell{1, 0});
  CHECK(resolve_cell(SplitPath("LRRL"), GridShape({4, 4})) == Cell{1, 2});
  CHECK(resolve_cell(SplitPath(""), GridShape({1, 1})) == Cell{0, 0});
}

TEST_CASE("resolve_cell rejects inconsistent paths") {
  CHECK_THROWS_AS(resolve_cell(SplitPath("L"), GridShape({2, 2})), InputError);
  CHECK_THROWS_AS(resolve_cell(SplitPath("LLL"), GridShape({2, 2})), InputError);
  CHECK_THROWS_AS(SplitPath("LX"), InputError);
}

TEST_CASE("square power-of-two grids decode as interleaved bits") {
  std::mt19937_64 rng(5);
  for (int h = 1; h <= 5; ++h) {
    const int side = 1 << h;
    for (int trial = 0; trial < 50; ++trial) {
      std::string steps;
      int bits[2] = {0, 0};
      for (int d = 0; d < 2 * h; ++d) {
        const bool right = (rng() & 1u) != 0;
        steps.push_back(right ? 'R' : 'L');
        bits[d % 2] = bits[d % 2] * 2 + (right ? 1 : 0);
      }
      CHECK(resolve_cell(SplitPath(steps), GridShape({side, side})) == Cell{bits[0], bits[1]});
    }
  }
}

TEST_CASE("recorded paths resolve to the assigned cells") {
  for (const auto& sides : std::vector<std::vector<int>>{{8, 8}, {5, 3}, {7}, {3, 2, 2}, {4, 4, 4}, {6, 1}}) {
    GridShape shape(sides);
    auto cloud = random_cloud(shape.volume(), shape.dims(), 42);
    auto asg = split_diffuse(cloud, shape);
    CHECK(is_bijection(asg));
    for (const auto& [id, cell] : asg.cells) CHECK(resolve_cell(asg.paths.at(id), shape) == cell);
  }
}

TEST_CASE("split_diffuse contract errors") {
  auto cloud = random_cloud(63, 2, 1);
  CHECK_THROWS_WITH_AS(split_diffuse(cloud, GridShape({8, 8})), doctest::Contains("size mismatch"), InputError);
  auto cloud3 = random_cloud(64, 3, 1);
  CHECK_THROWS_AS(split_diffuse(cloud3, GridShape({8, 8})), InputError);
  CHECK_THROWS_AS(split_diffuse(PointCloud(), GridShape({1})), InputError);
  CHECK_THROWS_AS(PointCloud(2, {{"a", {0.0, std::nan("")}}}), InputError);
  CHECK_THROWS_AS(PointCloud(2, {{"a", {0.0, 1.0}}, {"a", {1.0, 1.0}}}), InputError);
  CHECK_THROWS_AS(PointCloud(2, {{"a", {0.0}}}), InputError);
}

TEST_CASE("bijection and recursive sidedness on random clouds") {
  for (std::size_t dims = 1; dims <= 3; ++dims) {
    for (std::size_t n : {4u, 16u, 60u, 256u}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GridShape shape = balanced_shape(n, dims);
        auto cloud = random_cloud(n, dims, seed * 131 + n, seed % 2 == 1);
        auto asg = split_diffuse(cloud, shape);
        REQUIRE(is_bijection(asg));
        auto report = oracle::replay_sidedness(cloud, asg);
        CHECK(report.nodes == n - 1);
        CHECK(report.cell_violations == 0);
        CHECK(report.coord_violations == 0);
      }
    }
  }
}

TEST_CASE("matches the nested-ranking oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::size_t dims = 1; dims <= 3; ++dims) {
      const std::size_t n = 2 + seed * 13 % 200;
      GridShape shape = balanced_shape(n, dims);
      auto cloud = random_cloud(n, dims, seed + 1000 * dims, seed % 3 == 0);
      CHECK(split_diffuse(cloud, shape).cells == oracle::nested_rank_cells(cloud, shape.sides()));
    }
  }
}

TEST_CASE("lattice inputs are fixed points under axis scaling") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> scale(0.01, 100.0), offset(-50.0, 50.0);
  for (const auto& sides : std::vector<std::vector<int>>{{4, 4}, {8, 2}, {3, 5, 2}, {16}}) {
    GridShape shape(sides);
    std::vector<double> s(shape.dims()), o(shape.dims());
    for (auto& v : s) v = scale(rng);
    for (auto& v : o) v = offset(rng);
    auto cloud = lattice_cloud(shape, s, o);
    auto asg = split_diffuse(cloud, shape);
    for (std::size_t i = 0; i < shape.volume(); ++i) CHECK(asg.cells.at(cloud[i].id) == shape.cell_at(i));
  }
}

TEST_CASE("deterministic under input permutation") {
  auto cloud = random_cloud(128, 2, 77, true);
  auto pts = cloud.points();
  std::shuffle(pts.begin(), pts.end(), std::mt19937_64(3));
  PointCloud shuffled(2, pts);
  GridShape shape({16, 8});
  auto a = split_diffuse(cloud, shape);
  CHECK(a == split_diffuse(cloud, shape));
  CHECK(a == split_diffuse(shuffled, shape));
}

TEST_CASE("duplicates straddling the median split by capacity") {
  // Three points share x = 0; capacity puts exactly two on the left.
  PointCloud cloud(2, {{"a", {0, 0}}, {"b", {0, 1}}, {"c", {0, 2}}, {"d", {1, 0}}});
  auto asg = split_diffuse(cloud, GridShape({2, 2}));
  CHECK(is_bijection(asg));
  CHECK(asg.cells.at("a") == Cell{0, 0});
  CHECK(asg.cells.at("b") == Cell{0, 1});
  CHECK(asg.cells.at("c") == Cell{1, 1});
  CHECK(asg.cells.at("d") == Cell{1, 0});
}

TEST_CASE("sd_1d ranks") {
  std::vector<std::pair<std::string, double>> v = {{"a", 0.5}, {"b", 0.1}, {"c", 0.9}};
  CHECK(sd_1d(v) == std::map<std::string, int>{{"a", 1}, {"b", 0}, {"c", 2}});
  std::vector<std::pair<std::string, double>> tie = {{"b", 1.0}, {"a", 1.0}};
  CHECK(sd_1d(tie) == std::map<std::string, int>{{"a", 0}, {"b", 1}});
  std::vector<std::pair<std::string, double>> spaced;
  for (int i = 0; i < 10; ++i) spaced.push_back({testing_support::point_id(i), 0.25 * i});
  auto ranks = sd_1d(spaced);
  for (int i = 0; i < 10; ++i) CHECK(ranks.at(testing_support::point_id(i)) == i);

  std::vector<std::pair<std::string, double>> bad = {{"a", std::numeric_limits<double>::infinity()}};
  CHECK_THROWS_AS(sd_1d(bad), InputError);
  CHECK_THROWS_AS(sd_1d({}), InputError);
}

TEST_CASE("sd_1d agrees with one-dimensional split_diffuse") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 1 + seed * 7 % 90;
    auto cloud = random_cloud(n, 1, seed, seed % 2 == 0);
    std::vector<std::pair<std::string, double>> values;
    for (const auto& p : cloud.points()) values.push_back({p.id, p.coords[0]});
    auto ranks = sd_1d(values);
    auto asg = split_diffuse(cloud, GridShape({static_cast<int>(n)}));
    for (const auto& [id, rank] : ranks) CHECK(asg.cells.at(id)[0] == rank);
  }
}

TEST_CASE("grid shape parsing and balanced shapes") {
  CHECK(GridShape::parse("8x8").sides() == std::vector<int>{8, 8});
  CHECK(GridShape::parse("4x4x4").volume() == 64);
  CHECK(GridShape::parse("16").dims() == 1);
  CHECK_THROWS_AS(GridShape::parse("8x"), InputError);
  CHECK_THROWS_AS(GridShape::parse("0x4"), InputError);
  CHECK(balanced_shape(64, 2).sides() == std::vector<int>{8, 8});
  CHECK(balanced_shape(12, 2).sides() == std::vector<int>{4, 3});
  CHECK(balanced_shape(4, 3).sides() == std::vector<int>{2, 2, 1});
  CHECK(balanced_shape(256, 3).sides() == std::vector<int>{8, 8, 4});
  CHECK(balanced_shape(4096, 3).sides() == std::vector<int>{16, 16, 16});
  CHECK(balanced_shape(7, 2).sides() == std::vector<int>{7, 1});
  for (std::size_t n = 1; n < 300; ++n)
    for (std::size_t d = 1; d <= 3; ++d) CHECK(balanced_shape(n, d).volume() == n);
}
