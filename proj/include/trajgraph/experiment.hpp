#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "trajgraph/graphembed.hpp"
#include "trajgraph/ingest.hpp"
#include "trajgraph/metrics.hpp"
#include "trajgraph/pipeline.hpp"
#include "trajgraph/vrn.hpp"

namespace trajgraph::experiment {

struct ExperimentConfig {
  int folds = 5;
  int repeats = 5;
  uint64_t master_seed = 1;

  double r = 1.0;
  int initial_zoom = 2;
  int max_zoom = 9;
  int dot_offset = 4;

  embed::WalkConfig walk;
  vrn::VrnConfig vrn;

  int generated_count = 256;  // t
  pipeline::NextRegionRule rule = pipeline::NextRegionRule::sample_top_y;

  int kmeans_k = 8;
  bool with_baseline = true;
  std::optional<metrics::LocationEmbeddings> location_embeddings;
};

struct FoldRepeatReport {
  int fold = 0;
  int repeat = 0;
  metrics::EvalReport model;
  std::optional<metrics::EvalReport> levy;
};

struct ExperimentSummary {
  std::vector<FoldRepeatReport> runs;
  metrics::EvalReport model_mean;  // count histograms left empty: they are per-fold artifacts
  std::optional<metrics::EvalReport> levy_mean;
};

// Per (repeat, fold): regionalize the train split, embed, train the VRN,
// generate, and evaluate against the held-out split (plus the Levy Flight
// baseline on the same split). Stage seeds derive from (master_seed, stage,
// fold, repeat), so reruns are bitwise reproducible.
ExperimentSummary run_experiment(const ingest::Dataset& dataset, const ExperimentConfig& cfg,
                                 std::ostream* log = nullptr);

std::string summary_to_json(const ExperimentSummary& summary, const ExperimentConfig& cfg);

}  // namespace trajgraph::experiment
