#include "trajgraph/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "trajgraph/errors.hpp"

namespace trajgraph::pipeline {

namespace {

int sample_categorical(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u <= 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

int pick_next(const std::vector<double>& probs, int top_y, NextRegionRule rule, Rng& rng) {
  const std::vector<int> top = vrn::top_indices(probs, top_y);
  if (rule == NextRegionRule::argmax) {
    return top.front();
  }
  std::vector<double> weights;
  weights.reserve(top.size());
  for (int idx : top) weights.push_back(probs[idx]);
  return top[sample_categorical(weights, rng)];
}

}  // namespace

GeneratedTrajectory generate_one(const vrn::VrnModel& model, const vrn::LatentDictionary& dict,
                                 const sampler::Heatmap& heatmap, const GenerationConfig& cfg,
                                 Rng& rng) {
  if (dict.entries.empty()) {
    throw GenerationError("latent dictionary is empty");
  }
  if (cfg.m < 2 || cfg.top_y < 1) {
    throw GenerationError("generation config needs m >= 2 and top_y >= 1");
  }

  GeneratedTrajectory out;
  out.regions.reserve(cfg.m);

  // start region from the empirical first-region distribution of training
  const int start = sample_categorical(model.start_counts, rng);
  out.regions.push_back(model.vocabulary[start]);
  std::vector<double> belief = model.embedding_of(start);

  for (int pos = 1; pos < cfg.m; ++pos) {
    const geo::CellId& current = out.regions.back();
    const auto entry = dict.entries.find(current);
    if (entry == dict.entries.end()) {
      // terminal region: repeat it for the remaining steps
      out.truncated = true;
      while (static_cast<int>(out.regions.size()) < cfg.m) {
        out.regions.push_back(current);
      }
      break;
    }
    const auto& latents = entry->second;
    const std::vector<double>& z = latents[rng.uniform_int(latents.size())];
    // positions (pos-1, pos) form the transition, so the decoder sees the
    // source position, matching training
    const double pe = vrn::positional_encoding(pos - 1, std::max(model.sequence_length_m, cfg.m),
                                               model.config.normalized_pe);
    const auto logits = model.decode_logits(belief, z, pe);
    const auto probs = nn::softmax(logits);
    const int next = pick_next(probs, cfg.top_y, cfg.rule, rng);
    belief = vrn::belief_vector(probs, model.vocabulary, model.embeddings, cfg.top_y);
    out.regions.push_back(model.vocabulary[next]);
  }

  out.points.reserve(cfg.m);
  for (const auto& region : out.regions) {
    out.points.push_back(sampler::sample_point(region, heatmap, rng));
  }
  return out;
}

std::vector<GeneratedTrajectory> generate_set(const vrn::VrnModel& model,
                                              const vrn::LatentDictionary& dict,
                                              const sampler::Heatmap& heatmap,
                                              const GenerationConfig& cfg) {
  std::vector<GeneratedTrajectory> out;
  out.reserve(cfg.count);
  for (int i = 0; i < cfg.count; ++i) {
    const uint64_t sub = stable_seed(cfg.seed, "generate", static_cast<uint64_t>(i));
    Rng rng(sub);
    GeneratedTrajectory traj = generate_one(model, dict, heatmap, cfg, rng);
    traj.seed_used = sub;
    out.push_back(std::move(traj));
  }
  return out;
}

double duplicate_bound(int y, int m) {
  if (y < 1 || m < 1) {
    throw ArgumentError("duplicate_bound needs y >= 1 and m >= 1");
  }
  return std::pow(1.0 / y, m);
}

double log_duplicate_bound(int y, int m) {
  if (y < 1 || m < 1) {
    throw ArgumentError("log_duplicate_bound needs y >= 1 and m >= 1");
  }
  return -static_cast<double>(m) * std::log(static_cast<double>(y));
}

double duplicate_rate(const std::vector<GeneratedTrajectory>& generated) {
  if (generated.empty()) {
    throw ArgumentError("duplicate_rate of an empty set");
  }
  std::map<std::vector<std::string>, int> counts;
  for (const auto& traj : generated) {
    std::vector<std::string> key;
    key.reserve(traj.regions.size());
    for (const auto& r : traj.regions) key.push_back(r.address);
    ++counts[std::move(key)];
  }
  int64_t duplicated = 0;
  for (const auto& [key, n] : counts) {
    if (n > 1) duplicated += n;
  }
  return static_cast<double>(duplicated) / generated.size();
}

std::vector<std::vector<geo::Point>> points_of(const std::vector<GeneratedTrajectory>& generated) {
  std::vector<std::vector<geo::Point>> out;
  out.reserve(generated.size());
  for (const auto& g : generated) out.push_back(g.points);
  return out;
}

}  // namespace trajgraph::pipeline
