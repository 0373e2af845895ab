#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trajgraph/graphembed.hpp"
#include "trajgraph/hng.hpp"
#include "trajgraph/nn.hpp"

namespace trajgraph::vrn {

struct VrnConfig {
  int latent_dim = 16;
  int hidden_dim = 64;
  int top_y = 5;
  int epochs = 200;
  double lr = 1e-3;
  double kl_weight = 0.0;     // optional pull of latents toward the origin; off by default
  bool normalized_pe = false; // raw day index by default
  uint64_t seed = 1;
};

// Encoder compresses the next region's embedding into a latent; the decoder
// predicts the next region from (context embedding, latent, position).
struct VrnModel {
  embed::EmbeddingTable embeddings;
  nn::Mlp encoder;  // [dim, hidden, latent]
  nn::Mlp decoder;  // [dim + latent + 1, hidden, |vocab|]
  std::vector<geo::CellId> vocabulary;  // network cells in canonical order
  std::map<geo::CellId, int> vocab_index;
  std::vector<double> start_counts;  // empirical first-region counts of the training sequences
  VrnConfig config;
  std::vector<double> epoch_losses;
  int sequence_length_m = 0;

  const std::vector<double>& embedding_of(int index) const {
    return embeddings.at(vocabulary[index]);
  }
  std::vector<double> encode(const geo::CellId& cell) const;
  std::vector<double> decode_logits(const std::vector<double>& context,
                                    const std::vector<double>& latent, double pe) const;
};

// Raw position index by default; step/m in normalized mode.
double positional_encoding(int step, int m, bool normalized = false);

// Indices of the y highest-probability entries, ties broken toward the lower
// index; y is clamped to the vocabulary size.
std::vector<int> top_indices(const std::vector<double>& prob, int y);

// Probability-weighted sum of the top-y embeddings, using raw (unrenormalized)
// probabilities.
std::vector<double> belief_vector(const std::vector<double>& prob,
                                  const std::vector<geo::CellId>& vocabulary,
                                  const embed::EmbeddingTable& embeddings, int y);

VrnModel train(const hng::RegionNetwork& network, const std::vector<hng::RegionSequence>& sequences,
               const embed::EmbeddingTable& embeddings, const VrnConfig& cfg);

// Per-cell latents of every distinct observed outgoing transition.
struct LatentDictionary {
  int latent_dim = 0;
  std::map<geo::CellId, std::vector<std::vector<double>>> entries;
};

LatentDictionary build_latent_dictionary(const VrnModel& model,
                                         const hng::RegionNetwork& network);

std::string dictionary_to_json(const LatentDictionary& dict);
LatentDictionary dictionary_from_json(const std::string& json_text);

// Checkpoint: binary file (magic, dims, parameters row-major, start counts)
// plus a JSON metadata sidecar at path+".json" (config, vocabulary, losses).
void save_model(const VrnModel& model, const std::string& path);
VrnModel load_model(const std::string& path, const embed::EmbeddingTable& embeddings);

}  // namespace trajgraph::vrn
