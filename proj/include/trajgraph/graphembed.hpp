#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trajgraph/geo.hpp"
#include "trajgraph/hng.hpp"
#include "trajgraph/rng.hpp"

namespace trajgraph::embed {

struct WalkConfig {
  double p = 1.0;        // return parameter
  double q = 2.0;        // in-out parameter
  int walks_per_node = 20;
  int walk_length = 10;
  int window = 5;
  int negatives = 5;
  int dim = 32;
  int epochs = 5;
  double lr = 0.025;
  uint64_t seed = 1;
};

struct EmbeddingTable {
  int dim = 0;
  std::map<geo::CellId, std::vector<double>> vectors;

  const std::vector<double>& at(const geo::CellId& c) const;
  bool covers(const std::vector<geo::CellId>& cells) const;
};

// Adjacency view of the region network used by the walker. Nodes are in
// canonical (resolution, address) order; neighbor lists are sorted.
struct WalkGraph {
  std::vector<geo::CellId> nodes;
  std::map<geo::CellId, int> index;
  std::vector<std::vector<int>> out;

  bool has_edge(int from, int to) const;
  static WalkGraph from_network(const hng::RegionNetwork& network);
};

// One biased step: weight 1/p to return to `prev`, 1 to an out-neighbor of
// both `prev` and `cur`, 1/q otherwise. prev < 0 means first step (uniform).
// Returns -1 at dead ends.
int biased_next(const WalkGraph& graph, int prev, int cur, double p, double q, Rng& rng);

std::vector<std::vector<geo::CellId>> random_walks(const hng::RegionNetwork& network,
                                                   const WalkConfig& cfg, Rng& rng);

struct SkipgramResult {
  EmbeddingTable table;
  std::vector<double> epoch_losses;  // mean negative-sampling loss per epoch
};

SkipgramResult train_skipgram(const std::vector<std::vector<geo::CellId>>& walks,
                              const WalkConfig& cfg, Rng& rng);

// Convenience: walks + skip-gram with streams derived from cfg.seed.
SkipgramResult node2vec(const hng::RegionNetwork& network, const WalkConfig& cfg);

// Flat binary format: magic "TGEMB001", u32 dim, u64 count, the address
// table (u32 length + bytes per address, canonical order), then count*dim
// row-major float32 values. A JSON sidecar lands next to it at path+".json".
void save_embeddings(const EmbeddingTable& table, const std::string& path,
                     const std::string& metadata_json = "{}");
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace trajgraph::embed
