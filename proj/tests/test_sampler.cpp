#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "trajgraph/errors.hpp"
#include "trajgraph/sampler.hpp"
#include "trajgraph/synth.hpp"

using namespace trajgraph;
using namespace trajgraph::sampler;

namespace {

hng::RegionNetwork single_region(const std::vector<geo::Point>& points, int res = 4) {
  hng::RegionNetwork net;
  const geo::CellId region = geo::cell_of(points.front(), res);
  for (const auto& p : points) {
    REQUIRE(geo::cell_of(p, res) == region);
  }
  net.cells = {region};
  net.points_by_cell[region] = points;
  net.initial_zoom = res;
  return net;
}

}  // namespace

TEST_CASE("a lone point yields one dot with count one") {
  const auto net = single_region({{50.0, 8.0}});
  const auto heatmap = build_heatmap(net);
  REQUIRE(heatmap.regions.size() == 1);
  const auto& dots = heatmap.regions.begin()->second;
  REQUIRE(dots.size() == 1);
  CHECK(dots[0].count == 1);
  CHECK(dots[0].cell.resolution == net.cells[0].resolution + 4);
}

TEST_CASE("a tight cluster lands in one dot") {
  std::vector<geo::Point> points;
  for (int i = 0; i < 10; ++i) {
    points.push_back({50.0001 + i * 1e-6, 8.0001 + i * 1e-6});
  }
  const auto heatmap = build_heatmap(single_region(points));
  const auto& dots = heatmap.regions.begin()->second;
  REQUIRE(dots.size() == 1);
  CHECK(dots[0].count == 10);
}

TEST_CASE("dot counts conserve the training point total") {
  const auto ds = synth::corridor_dataset(8, 30, 0.2, 13);
  const auto region = hng::regionalize(ds, 1.0, 2, 9);
  const auto heatmap = build_heatmap(region.network);
  int64_t total = 0;
  for (const auto& [cell, dots] : heatmap.regions) {
    for (const auto& d : dots) {
      CHECK(d.count >= 1);
      // every dot nests inside its region
      CHECK(d.cell.address.substr(0, 0) == "");  // structural check below
      const auto box_region = geo::cell_box(cell);
      const auto box_dot = geo::cell_box(d.cell);
      CHECK(box_dot.lat_min >= box_region.lat_min);
      CHECK(box_dot.lat_max <= box_region.lat_max);
      CHECK(box_dot.lon_min >= box_region.lon_min);
      CHECK(box_dot.lon_max <= box_region.lon_max);
      total += d.count;
    }
  }
  CHECK(total == 8 * 30);
}

TEST_CASE("sampled points stay inside the requested region") {
  const auto ds = synth::corridor_dataset(6, 20, 0.2, 5);
  const auto region = hng::regionalize(ds, 1.0, 2, 9);
  const auto heatmap = build_heatmap(region.network);
  Rng rng(77);
  for (const auto& cell : region.network.cells) {
    for (int i = 0; i < 50; ++i) {
      const geo::Point p = sample_point(cell, heatmap, rng);
      CHECK(geo::cell_of(p, cell.resolution) == cell);
      CHECK(geo::cell_boundary(cell).contains(p));
    }
  }
}

TEST_CASE("dot selection follows the count proportions") {
  // two dots with counts 3 and 1: separate clusters inside one region
  std::vector<geo::Point> points = {{50.001, 8.001}, {50.0011, 8.0012}, {50.0012, 8.0011},
                                    {52.9, 10.9}};
  const auto net = single_region(points, 2);
  const auto heatmap = build_heatmap(net);
  const auto& dots = heatmap.regions.begin()->second;
  REQUIRE(dots.size() == 2);

  // identify the heavy dot's box
  const auto heavy = dots[0].count == 3 ? dots[0] : dots[1];
  REQUIRE(heavy.count == 3);
  Rng rng(99);
  int heavy_hits = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const geo::Point p = sample_point(net.cells[0], heatmap, rng);
    if (geo::cell_of(p, heavy.cell.resolution) == heavy.cell) ++heavy_hits;
  }
  const double freq = static_cast<double>(heavy_hits) / n;
  CHECK(freq > 0.70);
  CHECK(freq < 0.80);
}

TEST_CASE("sampling is deterministic per seed") {
  const auto net = single_region({{10.0, 10.0}, {10.001, 10.001}});
  const auto heatmap = build_heatmap(net);
  Rng a(3), b(3);
  for (int i = 0; i < 20; ++i) {
    const auto pa = sample_point(net.cells[0], heatmap, a);
    const auto pb = sample_point(net.cells[0], heatmap, b);
    CHECK(pa.lat == pb.lat);
    CHECK(pa.lon == pb.lon);
  }
}

TEST_CASE("unknown regions are rejected") {
  const auto net = single_region({{10.0, 10.0}});
  const auto heatmap = build_heatmap(net);
  Rng rng(1);
  CHECK_THROWS_AS(sample_point(geo::cell_of({.lat = -60, .lon = -120}, 4), heatmap, rng),
                  UnknownRegionError);
}

TEST_CASE("heatmap JSON round trip") {
  const auto ds = synth::corridor_dataset(4, 15, 0.1, 8);
  const auto region = hng::regionalize(ds, 1.0, 2, 9);
  const auto heatmap = build_heatmap(region.network, 3);
  const auto loaded = heatmap_from_json(heatmap_to_json(heatmap));
  CHECK(loaded.dot_resolution_offset == heatmap.dot_resolution_offset);
  REQUIRE(loaded.regions.size() == heatmap.regions.size());
  for (const auto& [cell, dots] : heatmap.regions) {
    const auto& got = loaded.regions.at(cell);
    REQUIRE(got.size() == dots.size());
    for (size_t i = 0; i < dots.size(); ++i) {
      CHECK(got[i].cell == dots[i].cell);
      CHECK(got[i].count == dots[i].count);
    }
  }
}
