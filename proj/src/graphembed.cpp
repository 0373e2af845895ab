#include "trajgraph/graphembed.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "trajgraph/errors.hpp"

namespace trajgraph::embed {

const std::vector<double>& EmbeddingTable::at(const geo::CellId& c) const {
  const auto it = vectors.find(c);
  if (it == vectors.end()) {
    throw UnknownRegionError("no embedding for cell " + c.address);
  }
  return it->second;
}

bool EmbeddingTable::covers(const std::vector<geo::CellId>& cells) const {
  return std::all_of(cells.begin(), cells.end(),
                     [&](const geo::CellId& c) { return vectors.count(c) == 1; });
}

WalkGraph WalkGraph::from_network(const hng::RegionNetwork& network) {
  WalkGraph g;
  g.nodes = network.cells;
  std::sort(g.nodes.begin(), g.nodes.end());
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    g.index[g.nodes[i]] = static_cast<int>(i);
  }
  g.out.resize(g.nodes.size());
  for (const auto& [from, to] : network.edges) {
    g.out[g.index.at(from)].push_back(g.index.at(to));
  }
  for (auto& neighbors : g.out) {
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
  }
  return g;
}

bool WalkGraph::has_edge(int from, int to) const {
  const auto& n = out[from];
  return std::binary_search(n.begin(), n.end(), to);
}

int biased_next(const WalkGraph& graph, int prev, int cur, double p, double q, Rng& rng) {
  const std::vector<int>& candidates = graph.out[cur];
  if (candidates.empty()) return -1;
  if (prev < 0) {
    return candidates[rng.uniform_int(candidates.size())];
  }
  double total = 0.0;
  std::vector<double> weights(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    const int x = candidates[i];
    double w;
    if (x == prev) {
      w = 1.0 / p;
    } else if (graph.has_edge(prev, x)) {
      w = 1.0;
    } else {
      w = 1.0 / q;
    }
    weights[i] = w;
    total += w;
  }
  double u = rng.uniform() * total;
  for (size_t i = 0; i < candidates.size(); ++i) {
    u -= weights[i];
    if (u <= 0.0) return candidates[i];
  }
  return candidates.back();
}

std::vector<std::vector<geo::CellId>> random_walks(const hng::RegionNetwork& network,
                                                   const WalkConfig& cfg, Rng& rng) {
  if (network.edges.empty()) {
    throw ArgumentError("cannot walk a network without edges");
  }
  if (cfg.p <= 0.0 || cfg.q <= 0.0 || cfg.walk_length < 2 || cfg.walks_per_node < 1) {
    throw ArgumentError("invalid walk config");
  }
  const WalkGraph graph = WalkGraph::from_network(network);
  std::vector<std::vector<geo::CellId>> walks;
  walks.reserve(graph.nodes.size() * cfg.walks_per_node);
  for (size_t start = 0; start < graph.nodes.size(); ++start) {
    for (int w = 0; w < cfg.walks_per_node; ++w) {
      std::vector<geo::CellId> walk;
      walk.reserve(cfg.walk_length);
      int prev = -1;
      int cur = static_cast<int>(start);
      walk.push_back(graph.nodes[cur]);
      while (static_cast<int>(walk.size()) < cfg.walk_length) {
        const int next = biased_next(graph, prev, cur, cfg.p, cfg.q, rng);
        if (next < 0) break;  // dead end truncates the walk
        walk.push_back(graph.nodes[next]);
        prev = cur;
        cur = next;
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

namespace {

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

SkipgramResult train_skipgram(const std::vector<std::vector<geo::CellId>>& walks,
                              const WalkConfig& cfg, Rng& rng) {
  if (walks.empty()) {
    throw ArgumentError("no walks to train on");
  }
  // vocabulary in canonical order, token counts for the noise distribution
  std::map<geo::CellId, int64_t> counts;
  for (const auto& walk : walks) {
    for (const auto& c : walk) ++counts[c];
  }
  if (counts.size() < 2) {
    throw TrainingError("degenerate graph: skip-gram needs a vocabulary of at least 2 cells");
  }
  std::vector<geo::CellId> vocab;
  vocab.reserve(counts.size());
  for (const auto& [cell, n] : counts) vocab.push_back(cell);
  std::map<geo::CellId, int> index;
  for (size_t i = 0; i < vocab.size(); ++i) index[vocab[i]] = static_cast<int>(i);

  // unigram^(3/4) noise distribution as a cumulative table
  std::vector<double> noise_cdf(vocab.size());
  double noise_total = 0.0;
  for (size_t i = 0; i < vocab.size(); ++i) {
    noise_total += std::pow(static_cast<double>(counts.at(vocab[i])), 0.75);
    noise_cdf[i] = noise_total;
  }
  auto sample_noise = [&]() {
    const double u = rng.uniform() * noise_total;
    const auto it = std::upper_bound(noise_cdf.begin(), noise_cdf.end(), u);
    return static_cast<int>(std::min<size_t>(it - noise_cdf.begin(), vocab.size() - 1));
  };

  const size_t dim = static_cast<size_t>(cfg.dim);
  std::vector<std::vector<double>> in(vocab.size()), out(vocab.size());
  for (size_t i = 0; i < vocab.size(); ++i) {
    in[i].resize(dim);
    for (double& v : in[i]) v = (rng.uniform() - 0.5) / cfg.dim;
    out[i].assign(dim, 0.0);
  }

  std::vector<int> walk_idx;
  SkipgramResult result;
  std::vector<double> update(dim);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    int64_t pair_count = 0;
    for (const auto& walk : walks) {
      walk_idx.clear();
      for (const auto& c : walk) walk_idx.push_back(index.at(c));
      const int n = static_cast<int>(walk_idx.size());
      for (int center = 0; center < n; ++center) {
        const int c = walk_idx[center];
        const int lo = std::max(0, center - cfg.window);
        const int hi = std::min(n - 1, center + cfg.window);
        for (int pos = lo; pos <= hi; ++pos) {
          if (pos == center) continue;
          const int o = walk_idx[pos];
          std::fill(update.begin(), update.end(), 0.0);
          double pair_loss = 0.0;
          for (int k = 0; k <= cfg.negatives; ++k) {
            int t;
            double label;
            if (k == 0) {
              t = o;
              label = 1.0;
            } else {
              t = sample_noise();
              if (t == o) continue;
              label = 0.0;
            }
            double f = 0.0;
            for (size_t d = 0; d < dim; ++d) f += in[c][d] * out[t][d];
            pair_loss += label > 0.5 ? -log_sigmoid(f) : -log_sigmoid(-f);
            const double g = (label - sigmoid(f)) * cfg.lr;
            for (size_t d = 0; d < dim; ++d) {
              update[d] += g * out[t][d];
              out[t][d] += g * in[c][d];
            }
          }
          for (size_t d = 0; d < dim; ++d) in[c][d] += update[d];
          loss_sum += pair_loss;
          ++pair_count;
        }
      }
    }
    result.epoch_losses.push_back(pair_count > 0 ? loss_sum / pair_count : 0.0);
  }

  result.table.dim = cfg.dim;
  for (size_t i = 0; i < vocab.size(); ++i) {
    for (double v : in[i]) {
      if (!std::isfinite(v)) {
        throw TrainingError("non-finite embedding for cell " + vocab[i].address);
      }
    }
    result.table.vectors.emplace(vocab[i], std::move(in[i]));
  }
  return result;
}

SkipgramResult node2vec(const hng::RegionNetwork& network, const WalkConfig& cfg) {
  Rng walk_rng(stable_seed(cfg.seed, "node2vec-walks"));
  const auto walks = random_walks(network, cfg, walk_rng);
  Rng train_rng(stable_seed(cfg.seed, "node2vec-train"));
  return train_skipgram(walks, cfg, train_rng);
}

// --- serialization ---

namespace {
constexpr char kMagic[8] = {'T', 'G', 'E', 'M', 'B', '0', '0', '1'};
}

void save_embeddings(const EmbeddingTable& table, const std::string& path,
                     const std::string& metadata_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out.write(kMagic, sizeof(kMagic));
  const uint32_t dim = static_cast<uint32_t>(table.dim);
  const uint64_t count = table.vectors.size();
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& [cell, vec] : table.vectors) {
    const uint32_t len = static_cast<uint32_t>(cell.address.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(cell.address.data(), len);
  }
  for (const auto& [cell, vec] : table.vectors) {
    for (double v : vec) {
      const float f = static_cast<float>(v);
      out.write(reinterpret_cast<const char*>(&f), sizeof(f));
    }
  }
  if (!out) {
    throw IoError("failed writing " + path);
  }
  std::ofstream sidecar(path + ".json");
  sidecar << metadata_json << "\n";
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("bad embedding file magic in " + path);
  }
  uint32_t dim = 0;
  uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  std::vector<std::string> addresses(count);
  for (auto& addr : addresses) {
    uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len > 4096) {
      throw ParseError("bad address length in " + path);
    }
    addr.resize(len);
    in.read(addr.data(), len);
  }
  EmbeddingTable table;
  table.dim = static_cast<int>(dim);
  for (const auto& addr : addresses) {
    std::vector<double> vec(dim);
    for (auto& v : vec) {
      float f = 0.0f;
      in.read(reinterpret_cast<char*>(&f), sizeof(f));
      v = static_cast<double>(f);
    }
    geo::CellId cell{0, addr};
    const auto colon = addr.find(':');
    if (addr.empty() || addr[0] != 'Q' || colon == std::string::npos) {
      throw ParseError("bad cell address '" + addr + "' in " + path);
    }
    cell.resolution = std::stoi(addr.substr(1, colon - 1));
    table.vectors.emplace(std::move(cell), std::move(vec));
  }
  if (!in) {
    throw ParseError("truncated embedding file " + path);
  }
  return table;
}

}  // namespace trajgraph::embed
