#include "trajgraph/experiment.hpp"

#include <algorithm>

#include "json.hpp"
#include "trajgraph/baselines.hpp"
#include "trajgraph/errors.hpp"
#include "trajgraph/hng.hpp"
#include "trajgraph/sampler.hpp"

namespace trajgraph::experiment {

using nlohmann::json;

namespace {

std::vector<std::vector<geo::Point>> dataset_points(const ingest::Dataset& ds) {
  std::vector<std::vector<geo::Point>> out;
  out.reserve(ds.trajectories.size());
  for (const auto& t : ds.trajectories) out.push_back(t.points);
  return out;
}

metrics::EvalReport mean_report(const std::vector<const metrics::EvalReport*>& reports) {
  metrics::EvalReport mean;
  if (reports.empty()) return mean;
  for (const auto& [name, match] : reports.front()->distance) {
    metrics::MatchReport acc;
    for (const auto* r : reports) {
      const auto it = r->distance.find(name);
      acc.mean_value += it->second.mean_value;
      acc.coverage += it->second.coverage;
    }
    acc.mean_value /= reports.size();
    acc.coverage /= reports.size();
    mean.distance[name] = acc;
  }
  bool all_defined = true;
  double r_sum = 0.0, chi_sum = 0.0;
  for (const auto* r : reports) {
    if (r->r_coeff) {
      r_sum += *r->r_coeff;
    } else {
      all_defined = false;
    }
    chi_sum += r->chi2;
  }
  if (all_defined) {
    mean.r_coeff = r_sum / reports.size();
  }
  mean.chi2 = chi_sum / reports.size();
  mean.k_used = reports.front()->k_used;
  return mean;
}

}  // namespace

ExperimentSummary run_experiment(const ingest::Dataset& dataset, const ExperimentConfig& cfg,
                                 std::ostream* log) {
  if (cfg.folds < 2 || cfg.repeats < 1) {
    throw ArgumentError("experiment needs folds >= 2 and repeats >= 1");
  }
  const auto splits = ingest::kfold(dataset, cfg.folds, stable_seed(cfg.master_seed, "kfold"));

  ExperimentSummary summary;
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    for (const auto& split : splits) {
      const int fold = split.fold_index;
      if (log) {
        *log << "[experiment] repeat " << rep << " fold " << fold << ": train "
             << split.train.size() << " test " << split.test.size() << "\n";
      }
      const ingest::Dataset train = ingest::select(dataset, split.train);
      const ingest::Dataset test = ingest::select(dataset, split.test);

      const auto region = hng::regionalize(train, cfg.r, cfg.initial_zoom, cfg.max_zoom);

      embed::WalkConfig walk_cfg = cfg.walk;
      walk_cfg.seed = stable_seed(cfg.master_seed, "embed", fold, rep);
      const auto embedding = embed::node2vec(region.network, walk_cfg);

      vrn::VrnConfig vrn_cfg = cfg.vrn;
      vrn_cfg.seed = stable_seed(cfg.master_seed, "vrn", fold, rep);
      const auto model = vrn::train(region.network, region.sequences, embedding.table, vrn_cfg);
      const auto dict = vrn::build_latent_dictionary(model, region.network);
      const auto heatmap = sampler::build_heatmap(region.network, cfg.dot_offset);

      pipeline::GenerationConfig gen_cfg;
      gen_cfg.count = cfg.generated_count;
      gen_cfg.m = dataset.m;
      gen_cfg.top_y = cfg.vrn.top_y;
      gen_cfg.rule = cfg.rule;
      gen_cfg.seed = stable_seed(cfg.master_seed, "generate", fold, rep);
      const auto generated = pipeline::generate_set(model, dict, heatmap, gen_cfg);

      FoldRepeatReport report;
      report.fold = fold;
      report.repeat = rep;
      const auto test_points = dataset_points(test);
      const uint64_t eval_seed = stable_seed(cfg.master_seed, "eval", fold, rep);
      const metrics::LocationEmbeddings* loc =
          cfg.location_embeddings ? &*cfg.location_embeddings : nullptr;
      report.model =
          metrics::evaluate(pipeline::points_of(generated), test_points, cfg.kmeans_k, eval_seed, loc);

      if (cfg.with_baseline) {
        const auto levy_params = baselines::fit_levy(train);
        Rng levy_rng(stable_seed(cfg.master_seed, "levy", fold, rep));
        const auto levy_trajs =
            baselines::levy_generate(levy_params, dataset.m, cfg.generated_count, levy_rng);
        report.levy = metrics::evaluate(levy_trajs, test_points, cfg.kmeans_k, eval_seed, loc);
      }
      summary.runs.push_back(std::move(report));
    }
  }

  std::vector<const metrics::EvalReport*> model_reports, levy_reports;
  for (const auto& run : summary.runs) {
    model_reports.push_back(&run.model);
    if (run.levy) levy_reports.push_back(&*run.levy);
  }
  summary.model_mean = mean_report(model_reports);
  if (!levy_reports.empty()) {
    summary.levy_mean = mean_report(levy_reports);
  }
  return summary;
}

namespace {

json report_json(const metrics::EvalReport& r) {
  json j;
  for (const auto& [name, match] : r.distance) {
    j["distance"][name] = {{"mean_value", match.mean_value}, {"coverage", match.coverage}};
  }
  if (r.r_coeff) {
    j["r_coeff"] = *r.r_coeff;
  } else {
    j["r_coeff"] = nullptr;
  }
  j["chi2"] = r.chi2;
  j["k_used"] = r.k_used;
  if (!r.counts_test.empty()) {
    j["counts_test"] = r.counts_test;
    j["counts_gen"] = r.counts_gen;
  }
  return j;
}

}  // namespace

std::string summary_to_json(const ExperimentSummary& summary, const ExperimentConfig& cfg) {
  json j;
  j["config"] = {{"folds", cfg.folds},
                 {"repeats", cfg.repeats},
                 {"master_seed", cfg.master_seed},
                 {"r", cfg.r},
                 {"initial_zoom", cfg.initial_zoom},
                 {"max_zoom", cfg.max_zoom},
                 {"dot_offset", cfg.dot_offset},
                 {"generated_count", cfg.generated_count},
                 {"kmeans_k", cfg.kmeans_k},
                 {"top_y", cfg.vrn.top_y},
                 {"vrn_epochs", cfg.vrn.epochs},
                 {"lr", cfg.vrn.lr}};
  json runs = json::array();
  for (const auto& run : summary.runs) {
    json r = {{"fold", run.fold}, {"repeat", run.repeat}, {"model", report_json(run.model)}};
    if (run.levy) {
      r["levy_flight"] = report_json(*run.levy);
    }
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);
  j["summary"]["model"] = report_json(summary.model_mean);
  if (summary.levy_mean) {
    j["summary"]["levy_flight"] = report_json(*summary.levy_mean);
  }
  return j.dump(2);
}

}  // namespace trajgraph::experiment
