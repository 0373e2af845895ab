#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "trajgraph/errors.hpp"
#include "trajgraph/pipeline.hpp"
#include "trajgraph/synth.hpp"

using namespace trajgraph;
using namespace trajgraph::pipeline;

namespace {

struct TrainedStack {
  hng::RegionalizeResult region;
  embed::SkipgramResult embedding;
  vrn::VrnModel model;
  vrn::LatentDictionary dict;
  sampler::Heatmap heatmap;
};

TrainedStack train_stack(const ingest::Dataset& ds, int vrn_epochs, uint64_t seed,
                         double r = 1.0) {
  TrainedStack s;
  s.region = hng::regionalize(ds, r, 2, 9);
  embed::WalkConfig walk;
  walk.dim = 24;
  walk.epochs = 4;
  walk.seed = stable_seed(seed, "walk");
  s.embedding = embed::node2vec(s.region.network, walk);
  vrn::VrnConfig cfg;
  cfg.epochs = vrn_epochs;
  cfg.seed = stable_seed(seed, "vrn");
  s.model = vrn::train(s.region.network, s.region.sequences, s.embedding.table, cfg);
  s.dict = vrn::build_latent_dictionary(s.model, s.region.network);
  s.heatmap = sampler::build_heatmap(s.region.network);
  return s;
}

}  // namespace

TEST_CASE("duplicate_bound arithmetic") {
  CHECK(duplicate_bound(1, 7) == 1.0);
  CHECK(duplicate_bound(2, 10) == doctest::Approx(1.0 / 1024.0).epsilon(1e-15));
  const double tiny = duplicate_bound(5, 185);
  CHECK(std::isfinite(tiny));
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1e-100);
  CHECK(log_duplicate_bound(5, 185) == doctest::Approx(-185.0 * std::log(5.0)));
  CHECK(!std::isnan(log_duplicate_bound(5, 1000000)));
  CHECK_THROWS_AS(duplicate_bound(0, 5), ArgumentError);
}

TEST_CASE("duplicate_rate counts trajectories sharing a region sequence") {
  const geo::CellId a{1, "Q1:0"}, b{1, "Q1:1"}, c{1, "Q1:2"};
  GeneratedTrajectory t1{{a, b}, {}, 0, false};
  GeneratedTrajectory t2{{a, c}, {}, 0, false};
  GeneratedTrajectory t3{{a, b}, {}, 0, false};
  CHECK(duplicate_rate({t1, t2}) == 0.0);
  CHECK(duplicate_rate({t1, t1}) == 1.0);
  CHECK(duplicate_rate({t1, t2, t3}) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(duplicate_rate({}), ArgumentError);
}

TEST_CASE("argmax generation on a single-corridor fixture replays the training path") {
  // one trajectory visiting three distinct cells: A, B, C
  ingest::Dataset ds;
  ds.m = 3;
  ds.trajectories.push_back({"t0", 0, {{10.0, 10.0}, {30.0, 60.0}, {-30.0, -60.0}}});
  ds.bounding_area = ingest::compute_bounding_box(ds.trajectories);
  const auto s = train_stack(ds, 300, 17);
  REQUIRE(s.region.network.cells.size() == 3);

  GenerationConfig cfg;
  cfg.count = 1;
  cfg.m = 3;
  cfg.top_y = 3;
  cfg.rule = NextRegionRule::argmax;
  cfg.seed = 4;
  Rng rng(cfg.seed);
  const auto traj = generate_one(s.model, s.dict, s.heatmap, cfg, rng);
  CHECK(traj.regions == s.region.sequences.front().cells);
  CHECK(!traj.truncated);

  // a longer horizon hits the terminal cell and repeats it with the flag set
  cfg.m = 5;
  Rng rng2(cfg.seed);
  const auto longer = generate_one(s.model, s.dict, s.heatmap, cfg, rng2);
  CHECK(longer.truncated);
  CHECK(longer.regions.size() == 5);
  CHECK(longer.regions[3] == longer.regions[2]);
  CHECK(longer.regions[4] == longer.regions[2]);
}

TEST_CASE("generated trajectories satisfy the length and containment contract") {
  const auto ds = synth::corridor_dataset(10, 25, 0.15, 33);
  const auto s = train_stack(ds, 40, 7);
  GenerationConfig cfg;
  cfg.count = 24;
  cfg.m = 25;
  cfg.seed = 11;
  const auto generated = generate_set(s.model, s.dict, s.heatmap, cfg);
  REQUIRE(generated.size() == 24);
  std::set<std::string> vocab;
  for (const auto& c : s.model.vocabulary) vocab.insert(c.address);
  for (const auto& g : generated) {
    CHECK(g.regions.size() == 25);
    CHECK(g.points.size() == 25);
    for (size_t i = 0; i < g.regions.size(); ++i) {
      CHECK(vocab.count(g.regions[i].address) == 1);
      CHECK(geo::cell_of(g.points[i], g.regions[i].resolution) == g.regions[i]);
    }
  }
}

TEST_CASE("generation is deterministic per seed") {
  const auto ds = synth::corridor_dataset(8, 15, 0.1, 3);
  const auto s = train_stack(ds, 30, 19);
  GenerationConfig cfg;
  cfg.count = 5;
  cfg.m = 15;
  cfg.seed = 23;
  const auto a = generate_set(s.model, s.dict, s.heatmap, cfg);
  const auto b = generate_set(s.model, s.dict, s.heatmap, cfg);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].regions == b[i].regions);
    for (size_t j = 0; j < a[i].points.size(); ++j) {
      CHECK(a[i].points[j] == b[i].points[j]);
    }
  }
}

TEST_CASE("corridor generation yields no duplicate region sequences") {
  const auto ds = synth::corridor_dataset(12, 25, 0.15, 55);
  const auto s = train_stack(ds, 40, 29);
  GenerationConfig cfg;
  cfg.count = 500;
  cfg.m = 25;
  cfg.top_y = 5;
  cfg.seed = 31;
  const auto generated = generate_set(s.model, s.dict, s.heatmap, cfg);
  CHECK(duplicate_rate(generated) == 0.0);
}

TEST_CASE("empty dictionary fails generation") {
  const auto ds = synth::corridor_dataset(6, 10, 0.1, 5);
  const auto s = train_stack(ds, 5, 37);
  GenerationConfig cfg;
  cfg.m = 10;
  Rng rng(1);
  CHECK_THROWS_AS(generate_one(s.model, vrn::LatentDictionary{}, s.heatmap, cfg, rng),
                  GenerationError);
}
