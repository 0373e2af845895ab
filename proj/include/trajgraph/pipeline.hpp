#pragma once

#include <cstdint>
#include <vector>

#include "trajgraph/sampler.hpp"
#include "trajgraph/vrn.hpp"

namespace trajgraph::pipeline {

enum class NextRegionRule { sample_top_y, argmax };

struct GenerationConfig {
  int count = 256;   // number of trajectories to generate
  int m = 2;         // points per trajectory
  int top_y = 5;
  uint64_t seed = 1;
  NextRegionRule rule = NextRegionRule::sample_top_y;
};

struct GeneratedTrajectory {
  std::vector<geo::CellId> regions;  // length m
  std::vector<geo::Point> points;    // length m, each inside its region
  uint64_t seed_used = 0;
  bool truncated = false;  // hit a terminal region and repeated it
};

GeneratedTrajectory generate_one(const vrn::VrnModel& model, const vrn::LatentDictionary& dict,
                                 const sampler::Heatmap& heatmap, const GenerationConfig& cfg,
                                 Rng& rng);

// cfg.count trajectories on substreams derived from (cfg.seed, index).
std::vector<GeneratedTrajectory> generate_set(const vrn::VrnModel& model,
                                              const vrn::LatentDictionary& dict,
                                              const sampler::Heatmap& heatmap,
                                              const GenerationConfig& cfg);

// (1/y)^m, the analytic bound on the probability that two generated region
// sequences coincide.
double duplicate_bound(int y, int m);
double log_duplicate_bound(int y, int m);  // natural log, safe for huge m

// Fraction of trajectories whose region sequence equals some other's.
double duplicate_rate(const std::vector<GeneratedTrajectory>& generated);

std::vector<std::vector<geo::Point>> points_of(const std::vector<GeneratedTrajectory>& generated);

}  // namespace trajgraph::pipeline
