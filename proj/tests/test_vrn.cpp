#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "trajgraph/errors.hpp"
#include "trajgraph/hng.hpp"
#include "trajgraph/synth.hpp"
#include "trajgraph/vrn.hpp"

using namespace trajgraph;
using namespace trajgraph::vrn;

namespace {

// dataset with two far-apart clusters so A and B land in distinct cells
ingest::Dataset two_cell_dataset() {
  ingest::Dataset ds;
  ds.m = 2;
  ds.trajectories.push_back({"t0", 0, {{10.0, 10.0}, {30.0, 60.0}}});
  ds.bounding_area = ingest::compute_bounding_box(ds.trajectories);
  return ds;
}

struct Fixture {
  hng::RegionalizeResult region;
  embed::SkipgramResult embedding;
};

Fixture make_fixture(const ingest::Dataset& ds, double r = 1.0, int dim = 16) {
  Fixture f;
  f.region = hng::regionalize(ds, r, 2, 9);
  embed::WalkConfig cfg;
  cfg.dim = dim;
  cfg.epochs = 3;
  cfg.seed = 7;
  f.embedding = embed::node2vec(f.region.network, cfg);
  return f;
}

}  // namespace

TEST_CASE("positional encoding modes") {
  CHECK(positional_encoding(0, 14) == 0.0);
  CHECK(positional_encoding(7, 14) == 7.0);
  CHECK(positional_encoding(7, 14, true) == doctest::Approx(0.5));
  CHECK_THROWS_AS(positional_encoding(14, 14), ArgumentError);
  CHECK_THROWS_AS(positional_encoding(-1, 14), ArgumentError);
}

TEST_CASE("belief vector puts raw top-y mass on embeddings") {
  embed::EmbeddingTable table;
  table.dim = 2;
  std::vector<geo::CellId> vocab;
  for (int i = 0; i < 3; ++i) {
    geo::CellId c{1, "Q1:" + std::to_string(i)};
    vocab.push_back(c);
  }
  table.vectors[vocab[0]] = {1.0, 0.0};
  table.vectors[vocab[1]] = {0.0, 1.0};
  table.vectors[vocab[2]] = {1.0, 1.0};

  SUBCASE("one-hot with y=1 returns the embedding exactly") {
    const auto b = belief_vector({0.0, 1.0, 0.0}, vocab, table, 1);
    CHECK(b == std::vector<double>{0.0, 1.0});
  }
  SUBCASE("equal probabilities over equal embeddings stay put") {
    embed::EmbeddingTable same;
    same.dim = 2;
    for (const auto& c : vocab) same.vectors[c] = {0.5, -0.5};
    const auto b = belief_vector({0.5, 0.5, 0.0}, vocab, same, 2);
    CHECK(b[0] == doctest::Approx(0.5));
    CHECK(b[1] == doctest::Approx(-0.5));
  }
  SUBCASE("direct evaluation of the top-2 weighted sum") {
    const auto b = belief_vector({0.6, 0.3, 0.1}, vocab, table, 2);
    CHECK(b[0] == doctest::Approx(0.6 * 1.0 + 0.3 * 0.0));
    CHECK(b[1] == doctest::Approx(0.6 * 0.0 + 0.3 * 1.0));
  }
  SUBCASE("y of full vocabulary equals the full expectation") {
    const std::vector<double> prob = {0.5, 0.3, 0.2};
    const auto b = belief_vector(prob, vocab, table, 3);
    CHECK(b[0] == doctest::Approx(0.5 + 0.2));
    CHECK(b[1] == doctest::Approx(0.3 + 0.2));
  }
}

TEST_CASE("top_indices breaks ties toward the lower index") {
  const auto top = top_indices({0.4, 0.4, 0.2}, 2);
  CHECK(top == std::vector<int>{0, 1});
}

TEST_CASE("overfit on a single A->B pair predicts B from A") {
  const auto ds = two_cell_dataset();
  const auto f = make_fixture(ds);
  REQUIRE(f.region.network.cells.size() == 2);

  VrnConfig cfg;
  cfg.epochs = 300;
  cfg.hidden_dim = 32;
  cfg.latent_dim = 8;
  cfg.seed = 3;
  const auto model = train(f.region.network, f.region.sequences, f.embedding.table, cfg);

  const auto& seq = f.region.sequences.front();
  const int a = model.vocab_index.at(seq.cells[0]);
  const int b = model.vocab_index.at(seq.cells[1]);
  const auto z = model.encode(seq.cells[1]);
  const auto logits = model.decode_logits(model.embedding_of(a), z, positional_encoding(0, 2));
  CHECK(static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin()) == b);
}

TEST_CASE("corridor training at least halves the mean epoch loss") {
  const auto ds = synth::corridor_dataset(12, 30, 0.15, 21);
  const auto f = make_fixture(ds, 1.0, 32);
  VrnConfig cfg;
  cfg.epochs = 60;
  cfg.seed = 5;
  const auto model = train(f.region.network, f.region.sequences, f.embedding.table, cfg);
  REQUIRE(model.epoch_losses.size() == 60);
  CHECK(model.epoch_losses.back() <= 0.5 * model.epoch_losses.front());
}

TEST_CASE("training is deterministic per seed") {
  const auto ds = two_cell_dataset();
  const auto f = make_fixture(ds);
  VrnConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 11;
  const auto m1 = train(f.region.network, f.region.sequences, f.embedding.table, cfg);
  const auto m2 = train(f.region.network, f.region.sequences, f.embedding.table, cfg);
  CHECK(m1.decoder.weights == m2.decoder.weights);
  CHECK(m1.encoder.weights == m2.encoder.weights);
  CHECK(m1.epoch_losses == m2.epoch_losses);
}

TEST_CASE("empty transition set fails training") {
  const auto ds = two_cell_dataset();
  const auto f = make_fixture(ds);
  VrnConfig cfg;
  CHECK_THROWS_AS(train(f.region.network, {}, f.embedding.table, cfg), TrainingError);
}

TEST_CASE("latent dictionary holds one latent per distinct transition") {
  // two trajectories: A->B and A->C, sharing start cell A
  ingest::Dataset ds;
  ds.m = 2;
  ds.trajectories.push_back({"t0", 0, {{10.0, 10.0}, {30.0, 60.0}}});
  ds.trajectories.push_back({"t1", 0, {{10.0, 10.0}, {-30.0, -60.0}}});
  ds.bounding_area = ingest::compute_bounding_box(ds.trajectories);
  const auto f = make_fixture(ds);
  REQUIRE(f.region.network.cells.size() == 3);

  VrnConfig cfg;
  cfg.epochs = 10;
  const auto model = train(f.region.network, f.region.sequences, f.embedding.table, cfg);
  const auto dict = build_latent_dictionary(model, f.region.network);

  const geo::CellId a = f.region.sequences[0].cells[0];
  const geo::CellId b = f.region.sequences[0].cells[1];
  const geo::CellId c = f.region.sequences[1].cells[1];
  REQUIRE(dict.entries.count(a) == 1);
  CHECK(dict.entries.at(a).size() == 2);
  // entries contain the encoder outputs bitwise
  const auto zb = model.encode(b);
  const auto& stored = dict.entries.at(a);
  CHECK(std::any_of(stored.begin(), stored.end(),
                    [&](const std::vector<double>& z) { return z == zb; }));
  // terminal cells have no dictionary entry
  CHECK(dict.entries.count(b) == 0);
  CHECK(dict.entries.count(c) == 0);
}

TEST_CASE("duplicate transitions across trajectories collapse to one latent") {
  ingest::Dataset ds;
  ds.m = 2;
  ds.trajectories.push_back({"t0", 0, {{10.0, 10.0}, {30.0, 60.0}}});
  ds.trajectories.push_back({"t1", 0, {{10.0, 10.0}, {30.0, 60.0}}});
  ds.bounding_area = ingest::compute_bounding_box(ds.trajectories);
  const auto f = make_fixture(ds);
  VrnConfig cfg;
  cfg.epochs = 5;
  const auto model = train(f.region.network, f.region.sequences, f.embedding.table, cfg);
  const auto dict = build_latent_dictionary(model, f.region.network);
  CHECK(dict.entries.at(f.region.sequences[0].cells[0]).size() == 1);
}

TEST_CASE("dictionary JSON round trip") {
  const auto ds = two_cell_dataset();
  const auto f = make_fixture(ds);
  VrnConfig cfg;
  cfg.epochs = 5;
  const auto model = train(f.region.network, f.region.sequences, f.embedding.table, cfg);
  const auto dict = build_latent_dictionary(model, f.region.network);
  const auto loaded = dictionary_from_json(dictionary_to_json(dict));
  CHECK(loaded.latent_dim == dict.latent_dim);
  REQUIRE(loaded.entries.size() == dict.entries.size());
  for (const auto& [cell, latents] : dict.entries) {
    CHECK(loaded.entries.at(cell) == latents);
  }
}

TEST_CASE("model checkpoint round trip preserves behavior bitwise") {
  const auto ds = synth::corridor_dataset(6, 12, 0.1, 2);
  const auto f = make_fixture(ds);
  VrnConfig cfg;
  cfg.epochs = 10;
  cfg.seed = 9;
  const auto model = train(f.region.network, f.region.sequences, f.embedding.table, cfg);

  const auto path = std::filesystem::temp_directory_path() / "tg_model_test.bin";
  save_model(model, path.string());
  const auto loaded = load_model(path.string(), f.embedding.table);

  CHECK(loaded.encoder.weights == model.encoder.weights);
  CHECK(loaded.decoder.weights == model.decoder.weights);
  CHECK(loaded.start_counts == model.start_counts);
  CHECK(loaded.vocabulary == model.vocabulary);
  CHECK(loaded.sequence_length_m == model.sequence_length_m);

  const auto z = model.encode(model.vocabulary[0]);
  const auto a = model.decode_logits(model.embedding_of(0), z, 0.0);
  const auto b = loaded.decode_logits(loaded.embedding_of(0), z, 0.0);
  CHECK(a == b);

  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}

TEST_CASE("decoder output is a finite logit vector over the vocabulary") {
  const auto ds = synth::corridor_dataset(6, 12, 0.1, 4);
  const auto f = make_fixture(ds);
  VrnConfig cfg;
  cfg.epochs = 5;
  const auto model = train(f.region.network, f.region.sequences, f.embedding.table, cfg);
  Rng rng(1);
  std::vector<double> z(cfg.latent_dim);
  for (double& v : z) v = rng.uniform(-2, 2);
  const auto logits = model.decode_logits(model.embedding_of(0), z, 3.0);
  CHECK(logits.size() == model.vocabulary.size());
  for (double v : logits) CHECK(std::isfinite(v));
  const auto probs = nn::softmax(logits);
  double total = 0;
  for (double p : probs) {
    CHECK(p >= 0.0);
    total += p;
  }
  CHECK(total == doctest::Approx(1.0));
}
