// trajgraph: learn a hierarchical region network from GPS trajectories and
// generate synthetic trajectories over it.
//
// Stage artifacts land in --out DIR under fixed names (dataset.json,
// network.json, embeddings.bin, model.bin, dict.json, generated.*), so the
// subcommands chain without repeating paths. Every flag can also come from a
// JSON config file (--config); explicit flags win.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "trajgraph/baselines.hpp"
#include "trajgraph/errors.hpp"
#include "trajgraph/experiment.hpp"
#include "trajgraph/graphembed.hpp"
#include "trajgraph/hng.hpp"
#include "trajgraph/ingest.hpp"
#include "trajgraph/io.hpp"
#include "trajgraph/metrics.hpp"
#include "trajgraph/pipeline.hpp"
#include "trajgraph/sampler.hpp"
#include "trajgraph/synth.hpp"
#include "trajgraph/vrn.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trajgraph;

namespace {

json g_config = json::object();

void load_config(const std::string& path) {
  if (path.empty()) return;
  try {
    g_config = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config file: ") + e.what());
  }
}

// flag > config > default
template <typename T>
void merge(const CLI::Option* opt, const std::string& key, T& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (g_config.contains(key)) {
    value = g_config.at(key).get<T>();
  }
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  return (fs::path(out_dir) / name).string();
}

std::string default_in(const std::string& explicit_path, const std::string& out_dir,
                       const std::string& name) {
  if (!explicit_path.empty()) return explicit_path;
  return (fs::path(out_dir) / name).string();
}

synth::CorridorSpec load_corridor(const std::string& path) {
  if (path.empty()) return synth::CorridorSpec::default_spec();
  synth::CorridorSpec spec;
  const json j = json::parse(io::read_file(path));
  for (const auto& wp : j.at("waypoints")) {
    spec.waypoints.push_back({wp.at(0).get<double>(), wp.at(1).get<double>()});
  }
  return spec;
}

pipeline::NextRegionRule parse_rule(const std::string& rule) {
  if (rule == "sample") return pipeline::NextRegionRule::sample_top_y;
  if (rule == "argmax") return pipeline::NextRegionRule::argmax;
  throw ArgumentError("unknown next-region rule '" + rule + "' (use sample or argmax)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajgraph: region-network trajectory generation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", dataset_path, network_path, embeddings_path,
              model_path, dict_path;
  uint64_t seed = 1;
  double r = 1.0;
  int top_y = 5, t_count = 256, folds = 5;

  app.add_option("--config", config_path, "JSON config file; flags override its keys");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corridor dataset");
  int synth_n = 60, synth_m = 60;
  double synth_noise = 0.15;
  std::string corridor_path;
  auto* synth_n_opt = synth_cmd->add_option("--n", synth_n, "number of subjects");
  auto* synth_m_opt = synth_cmd->add_option("--m", synth_m, "days per trajectory");
  auto* synth_noise_opt = synth_cmd->add_option("--noise", synth_noise, "positional noise, degrees");
  auto* synth_corridor_opt =
      synth_cmd->add_option("--corridor", corridor_path, "waypoint JSON {\"waypoints\":[[lat,lon],..]}");
  auto* synth_seed_opt = synth_cmd->add_option("--seed", seed, "random seed");
  auto* synth_out_opt = synth_cmd->add_option("--out", out_dir, "output directory");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "parse a tracking CSV export into a dataset");
  std::string csv_path, window_start = "03-01", window_end = "09-01";
  int max_gap_days = 7;
  double min_coverage = 0.8;
  ingest::ColumnMap columns;
  ingest_cmd->add_option("--csv", csv_path, "input CSV path")->required();
  auto* win_start_opt = ingest_cmd->add_option("--window-start", window_start, "clip window start MM-DD");
  auto* win_end_opt = ingest_cmd->add_option("--window-end", window_end, "clip window end MM-DD");
  auto* gap_opt = ingest_cmd->add_option("--max-gap-days", max_gap_days, "largest gap to interpolate");
  auto* cov_opt = ingest_cmd->add_option("--min-coverage", min_coverage, "minimum observed-day fraction");
  auto* col_id_opt = ingest_cmd->add_option("--id-column", columns.id, "subject id column");
  auto* col_time_opt = ingest_cmd->add_option("--time-column", columns.time, "timestamp column");
  auto* col_lat_opt = ingest_cmd->add_option("--lat-column", columns.lat, "latitude column");
  auto* col_lon_opt = ingest_cmd->add_option("--lon-column", columns.lon, "longitude column");
  auto* ingest_out_opt = ingest_cmd->add_option("--out", out_dir, "output directory");

  // regionalize
  auto* region_cmd = app.add_subcommand("regionalize", "build the hierarchical region network");
  int initial_zoom = 2, max_zoom = 9;
  auto* region_dataset_opt = region_cmd->add_option("--dataset", dataset_path, "dataset JSON path");
  auto* region_r_opt = region_cmd->add_option("--r", r, "split threshold, degrees");
  auto* region_zoom_opt = region_cmd->add_option("--initial-zoom", initial_zoom, "starting resolution");
  auto* region_maxzoom_opt = region_cmd->add_option("--max-zoom", max_zoom, "refinement cap");
  auto* region_out_opt = region_cmd->add_option("--out", out_dir, "output directory");

  // embed
  auto* embed_cmd = app.add_subcommand("embed", "pretrain region embeddings (node2vec)");
  embed::WalkConfig walk;
  auto* embed_network_opt = embed_cmd->add_option("--network", network_path, "network JSON path");
  auto* walk_p_opt = embed_cmd->add_option("--p", walk.p, "return parameter");
  auto* walk_q_opt = embed_cmd->add_option("--q", walk.q, "in-out parameter");
  auto* walk_wpn_opt = embed_cmd->add_option("--walks-per-node", walk.walks_per_node, "");
  auto* walk_len_opt = embed_cmd->add_option("--walk-length", walk.walk_length, "");
  auto* walk_win_opt = embed_cmd->add_option("--window", walk.window, "skip-gram window");
  auto* walk_neg_opt = embed_cmd->add_option("--negatives", walk.negatives, "negative samples");
  auto* walk_dim_opt = embed_cmd->add_option("--dim", walk.dim, "embedding width");
  auto* walk_epochs_opt = embed_cmd->add_option("--epochs", walk.epochs, "skip-gram epochs");
  auto* walk_lr_opt = embed_cmd->add_option("--lr", walk.lr, "skip-gram learning rate");
  auto* embed_seed_opt = embed_cmd->add_option("--seed", seed, "random seed");
  auto* embed_out_opt = embed_cmd->add_option("--out", out_dir, "output directory");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the encoder/decoder over region pairs");
  vrn::VrnConfig vrn_cfg;
  auto* train_network_opt = train_cmd->add_option("--network", network_path, "network JSON path");
  auto* train_emb_opt = train_cmd->add_option("--embeddings", embeddings_path, "embedding file path");
  auto* latent_opt = train_cmd->add_option("--latent-dim", vrn_cfg.latent_dim, "latent width");
  auto* hidden_opt = train_cmd->add_option("--hidden-dim", vrn_cfg.hidden_dim, "hidden width");
  auto* vrn_epochs_opt = train_cmd->add_option("--epochs", vrn_cfg.epochs, "training epochs");
  auto* vrn_lr_opt = train_cmd->add_option("--lr", vrn_cfg.lr, "learning rate");
  auto* kl_opt = train_cmd->add_option("--kl-weight", vrn_cfg.kl_weight, "latent origin pull, 0 = off");
  auto* pe_opt = train_cmd->add_flag("--normalized-pe", vrn_cfg.normalized_pe,
                                     "use step/m instead of the raw index");
  auto* train_topy_opt = train_cmd->add_option("--top-y", vrn_cfg.top_y, "belief vector width");
  auto* train_seed_opt = train_cmd->add_option("--seed", seed, "random seed");
  auto* train_out_opt = train_cmd->add_option("--out", out_dir, "output directory");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "sample synthetic trajectories from the model");
  int gen_m = 0;
  int dot_offset = 4;
  std::string rule = "sample";
  auto* gen_network_opt = gen_cmd->add_option("--network", network_path, "network JSON path");
  auto* gen_emb_opt = gen_cmd->add_option("--embeddings", embeddings_path, "embedding file path");
  auto* gen_model_opt = gen_cmd->add_option("--model", model_path, "model checkpoint path");
  auto* gen_dict_opt = gen_cmd->add_option("--dict", dict_path, "latent dictionary path");
  auto* gen_t_opt = gen_cmd->add_option("--t", t_count, "number of trajectories");
  auto* gen_m_opt = gen_cmd->add_option("--m", gen_m, "trajectory length (default: training m)");
  auto* gen_topy_opt = gen_cmd->add_option("--top-y", top_y, "belief vector width");
  auto* gen_rule_opt = gen_cmd->add_option("--rule", rule, "next region rule: sample | argmax");
  auto* gen_dot_opt = gen_cmd->add_option("--dot-offset", dot_offset, "dot resolution offset");
  auto* gen_seed_opt = gen_cmd->add_option("--seed", seed, "random seed");
  auto* gen_out_opt = gen_cmd->add_option("--out", out_dir, "output directory");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score generated trajectories against a test set");
  std::string generated_path, test_dataset_path, embed_table_path;
  int kmeans_k = 8;
  auto* eval_gen_opt = eval_cmd->add_option("--generated", generated_path, "generated CSV path");
  eval_cmd->add_option("--test-dataset", test_dataset_path, "held-out dataset JSON")->required();
  auto* eval_k_opt = eval_cmd->add_option("--k", kmeans_k, "k-means cluster count");
  auto* eval_table_opt = eval_cmd->add_option("--embed-table", embed_table_path,
                                              "location embedding CSV (lat,lon,v0,..)");
  auto* eval_seed_opt = eval_cmd->add_option("--seed", seed, "random seed");
  auto* eval_out_opt = eval_cmd->add_option("--out", out_dir, "output directory");

  // baseline
  auto* base_cmd = app.add_subcommand("baseline", "fit and sample the Levy Flight baseline");
  int base_m = 0;
  auto* base_dataset_opt = base_cmd->add_option("--dataset", dataset_path, "dataset JSON path");
  auto* base_t_opt = base_cmd->add_option("--t", t_count, "number of trajectories");
  auto* base_m_opt = base_cmd->add_option("--m", base_m, "trajectory length (default: dataset m)");
  auto* base_seed_opt = base_cmd->add_option("--seed", seed, "random seed");
  auto* base_out_opt = base_cmd->add_option("--out", out_dir, "output directory");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "full cross-validated protocol with baseline");
  experiment::ExperimentConfig exp_cfg;
  int repeats = 5;
  auto* exp_dataset_opt = exp_cmd->add_option("--dataset", dataset_path, "dataset JSON path");
  auto* exp_folds_opt = exp_cmd->add_option("--folds", folds, "cross-validation folds");
  auto* exp_repeats_opt = exp_cmd->add_option("--repeats", repeats, "identical repeats to average");
  auto* exp_r_opt = exp_cmd->add_option("--r", r, "split threshold, degrees");
  auto* exp_t_opt = exp_cmd->add_option("--t", t_count, "generated trajectories per fold");
  auto* exp_topy_opt = exp_cmd->add_option("--top-y", top_y, "belief vector width");
  auto* exp_k_opt = exp_cmd->add_option("--k", exp_cfg.kmeans_k, "k-means cluster count");
  auto* exp_epochs_opt = exp_cmd->add_option("--epochs", exp_cfg.vrn.epochs, "training epochs");
  auto* exp_lr_opt = exp_cmd->add_option("--lr", exp_cfg.vrn.lr, "learning rate");
  auto* exp_zoom_opt = exp_cmd->add_option("--initial-zoom", exp_cfg.initial_zoom, "");
  auto* exp_maxzoom_opt = exp_cmd->add_option("--max-zoom", exp_cfg.max_zoom, "");
  auto* exp_dot_opt = exp_cmd->add_option("--dot-offset", exp_cfg.dot_offset, "");
  auto* exp_table_opt = exp_cmd->add_option("--embed-table", embed_table_path,
                                            "location embedding CSV for the embed_sim metric");
  auto* exp_nobase_opt = exp_cmd->add_flag("--no-baseline", "skip the Levy Flight comparison");
  auto* exp_seed_opt = exp_cmd->add_option("--seed", seed, "master seed");
  auto* exp_out_opt = exp_cmd->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  std::string stage = "cli";
  try {
    load_config(config_path);

    if (app.got_subcommand(synth_cmd)) {
      stage = "synth";
      merge(synth_n_opt, "n", synth_n);
      merge(synth_m_opt, "m", synth_m);
      merge(synth_noise_opt, "noise", synth_noise);
      merge(synth_corridor_opt, "corridor", corridor_path);
      merge(synth_seed_opt, "seed", seed);
      merge(synth_out_opt, "out", out_dir);
      const auto ds = synth::corridor_dataset(synth_n, synth_m, synth_noise, seed,
                                              load_corridor(corridor_path));
      io::write_file(out_path(out_dir, "dataset.json"), io::dataset_to_json(ds));
      io::write_file(out_path(out_dir, "dataset.geojson"), io::trajectories_to_geojson(ds));
      std::cout << "wrote " << ds.trajectories.size() << " trajectories of " << ds.m
                << " days to " << out_dir << "/dataset.json\n";
    }

    if (app.got_subcommand(ingest_cmd)) {
      stage = "ingest";
      merge(win_start_opt, "window-start", window_start);
      merge(win_end_opt, "window-end", window_end);
      merge(gap_opt, "max-gap-days", max_gap_days);
      merge(cov_opt, "min-coverage", min_coverage);
      merge(col_id_opt, "id-column", columns.id);
      merge(col_time_opt, "time-column", columns.time);
      merge(col_lat_opt, "lat-column", columns.lat);
      merge(col_lon_opt, "lon-column", columns.lon);
      merge(ingest_out_opt, "out", out_dir);
      const auto parsed = io::read_file(csv_path);
      const auto result = ingest::parse_csv(parsed, columns);
      for (const auto& err : result.errors) {
        std::cerr << "row " << err.line << ": " << err.message << "\n";
      }
      const auto window = ingest::ClipWindow::parse(window_start, window_end);
      const auto ds = ingest::regularize(result.observations, window, max_gap_days, min_coverage);
      io::write_file(out_path(out_dir, "dataset.json"), io::dataset_to_json(ds));
      io::write_file(out_path(out_dir, "dataset.geojson"), io::trajectories_to_geojson(ds));
      std::cout << "parsed " << result.observations.size() << " observations ("
                << result.errors.size() << " rejected rows), kept " << ds.trajectories.size()
                << " trajectories of " << ds.m << " days\n";
    }

    if (app.got_subcommand(region_cmd)) {
      stage = "regionalize";
      merge(region_dataset_opt, "dataset", dataset_path);
      merge(region_r_opt, "r", r);
      merge(region_zoom_opt, "initial-zoom", initial_zoom);
      merge(region_maxzoom_opt, "max-zoom", max_zoom);
      merge(region_out_opt, "out", out_dir);
      const auto ds = io::dataset_from_json(
          io::read_file(default_in(dataset_path, out_dir, "dataset.json")));
      const auto result = hng::regionalize(ds, r, initial_zoom, max_zoom);
      io::write_file(out_path(out_dir, "network.json"), io::network_to_json(result));
      io::write_file(out_path(out_dir, "cells.geojson"), io::cells_to_geojson(result.network));
      for (const auto& w : result.network.warnings) {
        std::cerr << "warning: " << w << "\n";
      }
      std::cout << "network: " << result.network.cells.size() << " cells, "
                << result.network.edges.size() << " edges\n";
    }

    if (app.got_subcommand(embed_cmd)) {
      stage = "embed";
      merge(embed_network_opt, "network", network_path);
      merge(walk_p_opt, "p", walk.p);
      merge(walk_q_opt, "q", walk.q);
      merge(walk_wpn_opt, "walks-per-node", walk.walks_per_node);
      merge(walk_len_opt, "walk-length", walk.walk_length);
      merge(walk_win_opt, "window", walk.window);
      merge(walk_neg_opt, "negatives", walk.negatives);
      merge(walk_dim_opt, "dim", walk.dim);
      merge(walk_epochs_opt, "epochs", walk.epochs);
      merge(walk_lr_opt, "lr", walk.lr);
      merge(embed_seed_opt, "seed", seed);
      merge(embed_out_opt, "out", out_dir);
      const auto net = io::network_from_json(
          io::read_file(default_in(network_path, out_dir, "network.json")));
      walk.seed = seed;
      const auto result = embed::node2vec(net.network, walk);
      json meta = {{"dim", walk.dim}, {"count", result.table.vectors.size()},
                   {"seed", seed},   {"p", walk.p},
                   {"q", walk.q},    {"epoch_losses", result.epoch_losses}};
      embed::save_embeddings(result.table, out_path(out_dir, "embeddings.bin"), meta.dump(2));
      std::cout << "embedded " << result.table.vectors.size() << " cells at dim " << walk.dim
                << "\n";
    }

    if (app.got_subcommand(train_cmd)) {
      stage = "train";
      merge(train_network_opt, "network", network_path);
      merge(train_emb_opt, "embeddings", embeddings_path);
      merge(latent_opt, "latent-dim", vrn_cfg.latent_dim);
      merge(hidden_opt, "hidden-dim", vrn_cfg.hidden_dim);
      merge(vrn_epochs_opt, "epochs", vrn_cfg.epochs);
      merge(vrn_lr_opt, "lr", vrn_cfg.lr);
      merge(kl_opt, "kl-weight", vrn_cfg.kl_weight);
      merge(pe_opt, "normalized-pe", vrn_cfg.normalized_pe);
      merge(train_topy_opt, "top-y", vrn_cfg.top_y);
      merge(train_seed_opt, "seed", seed);
      merge(train_out_opt, "out", out_dir);
      const auto net = io::network_from_json(
          io::read_file(default_in(network_path, out_dir, "network.json")));
      const auto table =
          embed::load_embeddings(default_in(embeddings_path, out_dir, "embeddings.bin"));
      vrn_cfg.seed = seed;
      const auto model = vrn::train(net.network, net.sequences, table, vrn_cfg);
      vrn::save_model(model, out_path(out_dir, "model.bin"));
      const auto dict = vrn::build_latent_dictionary(model, net.network);
      io::write_file(out_path(out_dir, "dict.json"), vrn::dictionary_to_json(dict));
      std::cout << "trained " << vrn_cfg.epochs << " epochs; first loss "
                << model.epoch_losses.front() << ", final loss " << model.epoch_losses.back()
                << "; dictionary has " << dict.entries.size() << " cells\n";
    }

    if (app.got_subcommand(gen_cmd)) {
      stage = "generate";
      merge(gen_network_opt, "network", network_path);
      merge(gen_emb_opt, "embeddings", embeddings_path);
      merge(gen_model_opt, "model", model_path);
      merge(gen_dict_opt, "dict", dict_path);
      merge(gen_t_opt, "t", t_count);
      merge(gen_m_opt, "m", gen_m);
      merge(gen_topy_opt, "top-y", top_y);
      merge(gen_rule_opt, "rule", rule);
      merge(gen_dot_opt, "dot-offset", dot_offset);
      merge(gen_seed_opt, "seed", seed);
      merge(gen_out_opt, "out", out_dir);
      const auto net = io::network_from_json(
          io::read_file(default_in(network_path, out_dir, "network.json")));
      const auto table =
          embed::load_embeddings(default_in(embeddings_path, out_dir, "embeddings.bin"));
      const auto model = vrn::load_model(default_in(model_path, out_dir, "model.bin"), table);
      const auto dict =
          vrn::dictionary_from_json(io::read_file(default_in(dict_path, out_dir, "dict.json")));
      const auto heatmap = sampler::build_heatmap(net.network, dot_offset);
      io::write_file(out_path(out_dir, "heatmap.json"), sampler::heatmap_to_json(heatmap));
      pipeline::GenerationConfig cfg;
      cfg.count = t_count;
      cfg.m = gen_m > 0 ? gen_m : model.sequence_length_m;
      cfg.top_y = top_y;
      cfg.seed = seed;
      cfg.rule = parse_rule(rule);
      const auto generated = pipeline::generate_set(model, dict, heatmap, cfg);
      io::write_file(out_path(out_dir, "generated.geojson"), io::generated_to_geojson(generated));
      io::write_file(out_path(out_dir, "generated.csv"), io::generated_to_csv(generated));
      std::cout << "generated " << generated.size() << " trajectories of " << cfg.m
                << " days (duplicate rate " << pipeline::duplicate_rate(generated) << ")\n";
    }

    if (app.got_subcommand(eval_cmd)) {
      stage = "evaluate";
      merge(eval_gen_opt, "generated", generated_path);
      merge(eval_k_opt, "k", kmeans_k);
      merge(eval_table_opt, "embed-table", embed_table_path);
      merge(eval_seed_opt, "seed", seed);
      merge(eval_out_opt, "out", out_dir);
      const auto generated = io::points_from_csv(
          io::read_file(default_in(generated_path, out_dir, "generated.csv")));
      const auto test = io::dataset_from_json(io::read_file(test_dataset_path));
      std::vector<std::vector<geo::Point>> test_points;
      for (const auto& traj : test.trajectories) test_points.push_back(traj.points);
      std::optional<metrics::LocationEmbeddings> table;
      if (!embed_table_path.empty()) {
        table = metrics::parse_location_embeddings(io::read_file(embed_table_path));
      }
      const auto report = metrics::evaluate(generated, test_points, kmeans_k, seed,
                                            table ? &*table : nullptr);
      io::write_file(out_path(out_dir, "report.json"), metrics::report_to_json(report));
      std::cout << metrics::format_report_table({{"model", report}});
    }

    if (app.got_subcommand(base_cmd)) {
      stage = "baseline";
      merge(base_dataset_opt, "dataset", dataset_path);
      merge(base_t_opt, "t", t_count);
      merge(base_m_opt, "m", base_m);
      merge(base_seed_opt, "seed", seed);
      merge(base_out_opt, "out", out_dir);
      const auto ds = io::dataset_from_json(
          io::read_file(default_in(dataset_path, out_dir, "dataset.json")));
      const auto params = baselines::fit_levy(ds);
      Rng rng(seed);
      const auto trajs =
          baselines::levy_generate(params, base_m > 0 ? base_m : ds.m, t_count, rng);
      io::write_file(out_path(out_dir, "levy.csv"), io::points_to_csv(trajs, "levy"));
      ingest::Dataset as_ds;
      as_ds.m = base_m > 0 ? base_m : ds.m;
      for (size_t i = 0; i < trajs.size(); ++i) {
        as_ds.trajectories.push_back({"levy" + std::to_string(i), 0, trajs[i]});
      }
      io::write_file(out_path(out_dir, "levy.geojson"), io::trajectories_to_geojson(as_ds));
      std::cout << "levy baseline: step scale " << params.step_scale << " deg, angle sigma "
                << params.angle_sigma << " rad, " << trajs.size() << " trajectories\n";
    }

    if (app.got_subcommand(exp_cmd)) {
      stage = "experiment";
      merge(exp_dataset_opt, "dataset", dataset_path);
      merge(exp_folds_opt, "folds", folds);
      merge(exp_repeats_opt, "repeats", repeats);
      merge(exp_r_opt, "r", r);
      merge(exp_t_opt, "t", t_count);
      merge(exp_topy_opt, "top-y", top_y);
      merge(exp_k_opt, "k", exp_cfg.kmeans_k);
      merge(exp_epochs_opt, "epochs", exp_cfg.vrn.epochs);
      merge(exp_lr_opt, "lr", exp_cfg.vrn.lr);
      merge(exp_zoom_opt, "initial-zoom", exp_cfg.initial_zoom);
      merge(exp_maxzoom_opt, "max-zoom", exp_cfg.max_zoom);
      merge(exp_dot_opt, "dot-offset", exp_cfg.dot_offset);
      merge(exp_table_opt, "embed-table", embed_table_path);
      merge(exp_seed_opt, "seed", seed);
      merge(exp_out_opt, "out", out_dir);
      const auto ds = io::dataset_from_json(
          io::read_file(default_in(dataset_path, out_dir, "dataset.json")));
      exp_cfg.folds = folds;
      exp_cfg.repeats = repeats;
      exp_cfg.master_seed = seed;
      exp_cfg.r = r;
      exp_cfg.generated_count = t_count;
      exp_cfg.vrn.top_y = top_y;
      exp_cfg.with_baseline = exp_nobase_opt->count() == 0 &&
                              !(g_config.contains("no-baseline") && g_config["no-baseline"].get<bool>());
      if (!embed_table_path.empty()) {
        exp_cfg.location_embeddings =
            metrics::parse_location_embeddings(io::read_file(embed_table_path));
      }
      const auto summary = experiment::run_experiment(ds, exp_cfg, &std::cerr);
      fs::create_directories(out_dir);
      for (const auto& run : summary.runs) {
        json run_json = {{"fold", run.fold},
                         {"repeat", run.repeat},
                         {"model", json::parse(metrics::report_to_json(run.model))}};
        if (run.levy) {
          run_json["levy_flight"] = json::parse(metrics::report_to_json(*run.levy));
        }
        char name[64];
        std::snprintf(name, sizeof(name), "report_f%d_r%d.json", run.fold, run.repeat);
        io::write_file(out_path(out_dir, name), run_json.dump(2));
      }
      io::write_file(out_path(out_dir, "summary.json"),
                     experiment::summary_to_json(summary, exp_cfg));
      std::vector<std::pair<std::string, metrics::EvalReport>> rows = {{"model", summary.model_mean}};
      if (summary.levy_mean) {
        rows.push_back({"levy_flight", *summary.levy_mean});
      }
      std::cout << metrics::format_report_table(rows);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "[" << stage << "] error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "[" << stage << "] unexpected error: " << e.what() << "\n";
    return 2;
  }
}
