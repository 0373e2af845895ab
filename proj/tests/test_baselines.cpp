#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "trajgraph/baselines.hpp"
#include "trajgraph/errors.hpp"

using namespace trajgraph;
using namespace trajgraph::baselines;

namespace {

ingest::Dataset dataset_of(const std::vector<std::vector<geo::Point>>& trajs) {
  ingest::Dataset ds;
  ds.m = static_cast<int>(trajs.front().size());
  for (size_t i = 0; i < trajs.size(); ++i) {
    ds.trajectories.push_back({"t" + std::to_string(i), 0, trajs[i]});
  }
  ds.bounding_area = ingest::compute_bounding_box(ds.trajectories);
  return ds;
}

}  // namespace

TEST_CASE("straight constant-speed trajectories have near-zero angle sigma") {
  std::vector<geo::Point> straight;
  for (int i = 0; i < 10; ++i) straight.push_back({static_cast<double>(i), 2.0 * i});
  const auto params = fit_levy(dataset_of({straight}));
  CHECK(params.angle_sigma == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("unit steps give a unit median scale") {
  std::vector<geo::Point> traj;
  for (int i = 0; i < 8; ++i) traj.push_back({0.0, static_cast<double>(i)});
  const auto params = fit_levy(dataset_of({traj}));
  CHECK(params.step_scale == doctest::Approx(1.0));
}

TEST_CASE("zigzag turning angles match hand trigonometry") {
  // headings: 0, pi/2, 0 -> turns +pi/2 then -pi/2
  const std::vector<geo::Point> zigzag = {{0, 0}, {0, 1}, {1, 1}, {1, 2}};
  const auto turns = turning_angles(zigzag);
  REQUIRE(turns.size() == 2);
  CHECK(turns[0] == doctest::Approx(M_PI / 2));
  CHECK(turns[1] == doctest::Approx(-M_PI / 2));
  const auto params = fit_levy(dataset_of({zigzag}));
  // circular std of {+pi/2, -pi/2}: mean resultant length 0 on the sin axis,
  // cos mean = 0 -> R = 0 is degenerate; here cos(pi/2)=0 both, sin cancels
  CHECK(params.angle_sigma > 1.0);
}

TEST_CASE("start points are collected per trajectory") {
  std::vector<geo::Point> a = {{1, 1}, {2, 2}};
  std::vector<geo::Point> b = {{5, 5}, {6, 6}};
  const auto params = fit_levy(dataset_of({a, b}));
  REQUIRE(params.start_distribution.size() == 2);
  CHECK(params.start_distribution[0] == geo::Point{1, 1});
}

TEST_CASE("generated trajectories have the requested shape and valid points") {
  LevyParams params;
  params.step_scale = 0.3;
  params.angle_sigma = 0.4;
  params.start_distribution = {{50, 8}, {51, 9}};
  Rng rng(5);
  const auto trajs = levy_generate(params, 30, 20, rng);
  REQUIRE(trajs.size() == 20);
  for (const auto& t : trajs) {
    CHECK(t.size() == 30);
    for (const auto& p : t) CHECK(geo::is_valid(p));
  }
}

TEST_CASE("zero angle sigma keeps each trajectory collinear") {
  LevyParams params;
  params.step_scale = 0.1;
  params.angle_sigma = 0.0;
  params.start_distribution = {{0, 0}};
  Rng rng(9);
  const auto trajs = levy_generate(params, 12, 5, rng);
  for (const auto& t : trajs) {
    // all displacement vectors parallel: cross products vanish
    const double dx0 = t[1].lon - t[0].lon, dy0 = t[1].lat - t[0].lat;
    for (size_t i = 1; i + 1 < t.size(); ++i) {
      const double dx = t[i + 1].lon - t[i].lon, dy = t[i + 1].lat - t[i].lat;
      CHECK(std::abs(dx0 * dy - dy0 * dx) < 1e-9);
    }
  }
}

TEST_CASE("step length median approaches the half-Cauchy median") {
  LevyParams params;
  params.step_scale = 0.5;
  params.angle_sigma = 0.2;
  params.start_distribution = {{0, 0}};
  Rng rng(13);
  std::vector<double> lengths;
  const auto trajs = levy_generate(params, 101, 100, rng);
  for (const auto& t : trajs) {
    for (size_t i = 0; i + 1 < t.size(); ++i) {
      lengths.push_back(geo::euclidean_deg(t[i], t[i + 1]));
    }
  }
  REQUIRE(lengths.size() == 10000);
  std::sort(lengths.begin(), lengths.end());
  const double median = 0.5 * (lengths[4999] + lengths[5000]);
  // median of |Cauchy(0, s)| equals s; clamping at 10 s does not move it
  CHECK(median == doctest::Approx(params.step_scale).epsilon(0.10));
}

TEST_CASE("generation is deterministic per seed") {
  LevyParams params;
  params.step_scale = 0.2;
  params.angle_sigma = 0.3;
  params.start_distribution = {{10, 10}};
  Rng a(3), b(3);
  const auto ta = levy_generate(params, 10, 3, a);
  const auto tb = levy_generate(params, 10, 3, b);
  for (size_t i = 0; i < ta.size(); ++i) {
    for (size_t j = 0; j < ta[i].size(); ++j) {
      CHECK(ta[i][j] == tb[i][j]);
    }
  }
}

TEST_CASE("argument validation") {
  LevyParams params;
  params.step_scale = 0.2;
  params.start_distribution = {{0, 0}};
  Rng rng(1);
  CHECK_THROWS_AS(levy_generate(params, 1, 5, rng), ArgumentError);
  CHECK_THROWS_AS(fit_levy(ingest::Dataset{}), ArgumentError);
}
