#include "trajgraph/vrn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "trajgraph/errors.hpp"

namespace trajgraph::vrn {

using nlohmann::json;

double positional_encoding(int step, int m, bool normalized) {
  if (m < 1 || step < 0 || step >= m) {
    throw ArgumentError("positional encoding step " + std::to_string(step) +
                        " outside [0, " + std::to_string(m) + ")");
  }
  return normalized ? static_cast<double>(step) / m : static_cast<double>(step);
}

std::vector<int> top_indices(const std::vector<double>& prob, int y) {
  if (y < 1) {
    throw ArgumentError("top-y needs y >= 1");
  }
  std::vector<int> order(prob.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return prob[a] > prob[b]; });
  order.resize(std::min<size_t>(order.size(), static_cast<size_t>(y)));
  return order;
}

std::vector<double> belief_vector(const std::vector<double>& prob,
                                  const std::vector<geo::CellId>& vocabulary,
                                  const embed::EmbeddingTable& embeddings, int y) {
  if (prob.size() != vocabulary.size()) {
    throw ArgumentError("probability vector width != vocabulary size");
  }
  std::vector<double> belief(embeddings.dim, 0.0);
  for (int idx : top_indices(prob, y)) {
    const auto& emb = embeddings.at(vocabulary[idx]);
    for (size_t d = 0; d < belief.size(); ++d) {
      belief[d] += prob[idx] * emb[d];
    }
  }
  return belief;
}

std::vector<double> VrnModel::encode(const geo::CellId& cell) const {
  return nn::forward(encoder, embeddings.at(cell));
}

std::vector<double> VrnModel::decode_logits(const std::vector<double>& context,
                                            const std::vector<double>& latent, double pe) const {
  std::vector<double> input;
  input.reserve(context.size() + latent.size() + 1);
  input.insert(input.end(), context.begin(), context.end());
  input.insert(input.end(), latent.begin(), latent.end());
  input.push_back(pe);
  return nn::forward(decoder, input);
}

namespace {

struct Example {
  int src;
  int dst;
  int pos;
};

}  // namespace

VrnModel train(const hng::RegionNetwork& network, const std::vector<hng::RegionSequence>& sequences,
               const embed::EmbeddingTable& embeddings, const VrnConfig& cfg) {
  VrnModel model;
  model.config = cfg;
  model.vocabulary = network.cells;
  std::sort(model.vocabulary.begin(), model.vocabulary.end());
  if (!embeddings.covers(model.vocabulary)) {
    throw TrainingError("embedding table does not cover the network vocabulary");
  }
  for (size_t i = 0; i < model.vocabulary.size(); ++i) {
    model.vocab_index[model.vocabulary[i]] = static_cast<int>(i);
  }
  model.embeddings = embeddings;
  model.start_counts.assign(model.vocabulary.size(), 0.0);

  std::vector<Example> examples;
  int m = 0;
  for (const auto& seq : sequences) {
    if (seq.cells.empty()) continue;
    m = std::max(m, static_cast<int>(seq.cells.size()));
    model.start_counts[model.vocab_index.at(seq.cells.front())] += 1.0;
    for (size_t t = 0; t + 1 < seq.cells.size(); ++t) {
      examples.push_back({model.vocab_index.at(seq.cells[t]),
                          model.vocab_index.at(seq.cells[t + 1]), static_cast<int>(t)});
    }
  }
  if (examples.empty()) {
    throw TrainingError("no transitions to train on");
  }
  model.sequence_length_m = m;

  const int dim = embeddings.dim;
  const int vocab = static_cast<int>(model.vocabulary.size());
  Rng init_rng(stable_seed(cfg.seed, "vrn-init"));
  model.encoder = nn::make_mlp({dim, cfg.hidden_dim, cfg.latent_dim}, init_rng);
  model.decoder = nn::make_mlp({dim + cfg.latent_dim + 1, cfg.hidden_dim, vocab}, init_rng);

  auto enc_params = nn::param_blocks(model.encoder);
  auto dec_params = nn::param_blocks(model.decoder);
  nn::AdamState enc_state = nn::AdamState::for_blocks(enc_params, cfg.lr);
  nn::AdamState dec_state = nn::AdamState::for_blocks(dec_params, cfg.lr);

  Rng order_rng(stable_seed(cfg.seed, "vrn-order"));
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> dec_input(dim + cfg.latent_dim + 1);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[order_rng.uniform_int(i)]);
    }
    double loss_sum = 0.0;
    for (size_t idx : order) {
      const Example& ex = examples[idx];
      const auto& src_emb = model.embedding_of(ex.src);
      const auto& dst_emb = model.embedding_of(ex.dst);
      const double pe = positional_encoding(ex.pos, m, cfg.normalized_pe);

      const auto enc_trace = nn::forward_trace(model.encoder, dst_emb);
      const std::vector<double>& z = enc_trace.output;
      std::copy(src_emb.begin(), src_emb.end(), dec_input.begin());
      std::copy(z.begin(), z.end(), dec_input.begin() + dim);
      dec_input[dim + cfg.latent_dim] = pe;

      const auto dec_trace = nn::forward_trace(model.decoder, dec_input);
      const auto sm = nn::softmax_xent(dec_trace.output, ex.dst);
      double loss = sm.loss;

      const auto dec_grads = nn::backward(model.decoder, dec_trace, sm.logit_grad);
      std::vector<double> dz(dec_grads.input.begin() + dim,
                             dec_grads.input.begin() + dim + cfg.latent_dim);
      if (cfg.kl_weight > 0.0) {
        double znorm2 = 0.0;
        for (size_t d = 0; d < z.size(); ++d) {
          dz[d] += cfg.kl_weight * z[d];
          znorm2 += z[d] * z[d];
        }
        loss += 0.5 * cfg.kl_weight * znorm2;
      }
      const auto enc_grads = nn::backward(model.encoder, enc_trace, dz);

      nn::adam_step(dec_state, dec_params, nn::grad_blocks(dec_grads));
      nn::adam_step(enc_state, enc_params, nn::grad_blocks(enc_grads));
      loss_sum += loss;
    }
    model.epoch_losses.push_back(loss_sum / examples.size());
  }
  return model;
}

LatentDictionary build_latent_dictionary(const VrnModel& model,
                                         const hng::RegionNetwork& network) {
  LatentDictionary dict;
  dict.latent_dim = model.config.latent_dim;
  // network.edges is already the deduplicated transition set, in canonical order
  for (const auto& [from, to] : network.edges) {
    dict.entries[from].push_back(model.encode(to));
  }
  return dict;
}

std::string dictionary_to_json(const LatentDictionary& dict) {
  json j;
  j["latent_dim"] = dict.latent_dim;
  json entries = json::object();
  for (const auto& [cell, latents] : dict.entries) {
    json list = json::array();
    for (const auto& z : latents) list.push_back(z);
    entries[cell.address] = std::move(list);
  }
  j["entries"] = std::move(entries);
  return j.dump();
}

LatentDictionary dictionary_from_json(const std::string& json_text) {
  LatentDictionary dict;
  try {
    const json j = json::parse(json_text);
    dict.latent_dim = j.at("latent_dim").get<int>();
    for (const auto& [address, latents] : j.at("entries").items()) {
      geo::CellId cell{0, address};
      cell.resolution = std::stoi(address.substr(1, address.find(':') - 1));
      auto& list = dict.entries[cell];
      for (const auto& z : latents) {
        list.push_back(z.get<std::vector<double>>());
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad latent dictionary JSON: ") + e.what());
  }
  return dict;
}

// --- checkpoint ---

namespace {

constexpr char kMagic[8] = {'T', 'G', 'V', 'R', 'N', '0', '0', '1'};

void write_block(std::ofstream& out, const std::vector<double>& block) {
  const uint64_t n = block.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(block.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
}

std::vector<double> read_block(std::ifstream& in) {
  uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  std::vector<double> block(n);
  in.read(reinterpret_cast<char*>(block.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) {
    throw ParseError("truncated model checkpoint");
  }
  return block;
}

void write_mlp(std::ofstream& out, const nn::Mlp& mlp) {
  const uint32_t layers = static_cast<uint32_t>(mlp.layer_dims.size());
  out.write(reinterpret_cast<const char*>(&layers), sizeof(layers));
  for (int d : mlp.layer_dims) {
    const uint32_t v = static_cast<uint32_t>(d);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  for (size_t l = 0; l < mlp.layer_count(); ++l) {
    write_block(out, mlp.weights[l]);
    write_block(out, mlp.biases[l]);
  }
}

nn::Mlp read_mlp(std::ifstream& in) {
  uint32_t layers = 0;
  in.read(reinterpret_cast<char*>(&layers), sizeof(layers));
  if (!in || layers < 2 || layers > 64) {
    throw ParseError("bad layer count in model checkpoint");
  }
  nn::Mlp mlp;
  for (uint32_t i = 0; i < layers; ++i) {
    uint32_t d = 0;
    in.read(reinterpret_cast<char*>(&d), sizeof(d));
    mlp.layer_dims.push_back(static_cast<int>(d));
  }
  for (uint32_t l = 0; l + 1 < layers; ++l) {
    mlp.weights.push_back(read_block(in));
    mlp.biases.push_back(read_block(in));
  }
  return mlp;
}

}  // namespace

void save_model(const VrnModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out.write(kMagic, sizeof(kMagic));
  write_mlp(out, model.encoder);
  write_mlp(out, model.decoder);
  write_block(out, model.start_counts);
  if (!out) {
    throw IoError("failed writing " + path);
  }

  json meta;
  meta["config"] = {{"latent_dim", model.config.latent_dim},
                    {"hidden_dim", model.config.hidden_dim},
                    {"top_y", model.config.top_y},
                    {"epochs", model.config.epochs},
                    {"lr", model.config.lr},
                    {"kl_weight", model.config.kl_weight},
                    {"normalized_pe", model.config.normalized_pe},
                    {"seed", model.config.seed}};
  json vocab = json::array();
  for (const auto& c : model.vocabulary) vocab.push_back(c.address);
  meta["vocabulary"] = std::move(vocab);
  meta["epoch_losses"] = model.epoch_losses;
  meta["sequence_length_m"] = model.sequence_length_m;
  std::ofstream sidecar(path + ".json");
  sidecar << meta.dump(2) << "\n";
}

VrnModel load_model(const std::string& path, const embed::EmbeddingTable& embeddings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("bad model checkpoint magic in " + path);
  }
  VrnModel model;
  model.encoder = read_mlp(in);
  model.decoder = read_mlp(in);
  model.start_counts = read_block(in);

  std::ifstream sidecar(path + ".json");
  if (!sidecar) {
    throw IoError("missing model metadata " + path + ".json");
  }
  json meta;
  try {
    sidecar >> meta;
    const json& cfg = meta.at("config");
    model.config.latent_dim = cfg.at("latent_dim").get<int>();
    model.config.hidden_dim = cfg.at("hidden_dim").get<int>();
    model.config.top_y = cfg.at("top_y").get<int>();
    model.config.epochs = cfg.at("epochs").get<int>();
    model.config.lr = cfg.at("lr").get<double>();
    model.config.kl_weight = cfg.at("kl_weight").get<double>();
    model.config.normalized_pe = cfg.at("normalized_pe").get<bool>();
    model.config.seed = cfg.at("seed").get<uint64_t>();
    model.sequence_length_m = meta.at("sequence_length_m").get<int>();
    model.epoch_losses = meta.at("epoch_losses").get<std::vector<double>>();
    for (const auto& addr : meta.at("vocabulary")) {
      const std::string address = addr.get<std::string>();
      geo::CellId cell{0, address};
      cell.resolution = std::stoi(address.substr(1, address.find(':') - 1));
      model.vocabulary.push_back(std::move(cell));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad model metadata: ") + e.what());
  }
  for (size_t i = 0; i < model.vocabulary.size(); ++i) {
    model.vocab_index[model.vocabulary[i]] = static_cast<int>(i);
  }
  if (!embeddings.covers(model.vocabulary)) {
    throw TrainingError("embedding table does not cover the checkpoint vocabulary");
  }
  model.embeddings = embeddings;
  if (model.decoder.output_dim() != static_cast<int>(model.vocabulary.size()) ||
      model.start_counts.size() != model.vocabulary.size()) {
    throw ParseError("model checkpoint is inconsistent with its vocabulary");
  }
  return model;
}

}  // namespace trajgraph::vrn
