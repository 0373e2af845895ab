#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

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

namespace py = pybind11;
using namespace trajgraph;

namespace {

using LatLon = std::pair<double, double>;

std::vector<geo::Point> to_points(const std::vector<LatLon>& pts) {
  std::vector<geo::Point> out;
  out.reserve(pts.size());
  for (const auto& [lat, lon] : pts) out.push_back({lat, lon});
  return out;
}

std::vector<LatLon> from_points(const std::vector<geo::Point>& pts) {
  std::vector<LatLon> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(p.lat, p.lon);
  return out;
}

std::vector<std::vector<geo::Point>> to_point_sets(const std::vector<std::vector<LatLon>>& sets) {
  std::vector<std::vector<geo::Point>> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(to_points(s));
  return out;
}

geo::CellId cell_from_address(const std::string& address) {
  const auto colon = address.find(':');
  if (address.empty() || address[0] != 'Q' || colon == std::string::npos) {
    throw ParseError("bad cell address '" + address + "'");
  }
  return geo::CellId{std::stoi(address.substr(1, colon - 1)), address};
}

py::dict report_dict(const metrics::EvalReport& r) {
  py::dict out;
  py::dict distance;
  for (const auto& [name, match] : r.distance) {
    py::dict m;
    m["mean_value"] = match.mean_value;
    m["coverage"] = match.coverage;
    distance[name.c_str()] = m;
  }
  out["distance"] = distance;
  out["r_coeff"] = r.r_coeff ? py::cast(*r.r_coeff) : py::none();
  out["chi2"] = r.chi2;
  out["k_used"] = r.k_used;
  out["counts_test"] = r.counts_test;
  out["counts_gen"] = r.counts_gen;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Region-network trajectory generation toolkit";

  py::register_exception<Error>(m, "TrajgraphError");

  // --- geo ---
  m.def(
      "cell_of",
      [](double lat, double lon, int resolution) {
        return geo::cell_of({lat, lon}, resolution).address;
      },
      py::arg("lat"), py::arg("lon"), py::arg("resolution"),
      "Cell address of a point at a resolution");
  m.def(
      "cell_boundary",
      [](const std::string& address) {
        return from_points(geo::cell_boundary(cell_from_address(address)).vertices);
      },
      py::arg("address"));
  m.def(
      "euclidean_deg",
      [](const LatLon& a, const LatLon& b) {
        return geo::euclidean_deg({a.first, a.second}, {b.first, b.second});
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "sample_point_in_cell",
      [](const std::string& address, uint64_t seed) {
        Rng rng(seed);
        const geo::Point p = geo::sample_point_in_cell(cell_from_address(address), rng);
        return LatLon{p.lat, p.lon};
      },
      py::arg("address"), py::arg("seed"));

  // --- datasets ---
  py::class_<ingest::Dataset>(m, "Dataset")
      .def_readonly("m", &ingest::Dataset::m)
      .def("__len__", [](const ingest::Dataset& ds) { return ds.trajectories.size(); })
      .def("ids",
           [](const ingest::Dataset& ds) {
             std::vector<std::string> out;
             for (const auto& t : ds.trajectories) out.push_back(t.id);
             return out;
           })
      .def(
          "points",
          [](const ingest::Dataset& ds, size_t index) {
            if (index >= ds.trajectories.size()) {
              throw ArgumentError("trajectory index out of range");
            }
            return from_points(ds.trajectories[index].points);
          },
          py::arg("index"))
      .def("to_json", &io::dataset_to_json);
  m.def("dataset_from_json", &io::dataset_from_json, py::arg("json_text"));
  m.def(
      "synth_corridor",
      [](int subjects, int m_days, double noise, uint64_t seed) {
        return synth::corridor_dataset(subjects, m_days, noise, seed);
      },
      py::arg("subjects") = 60, py::arg("m") = 60, py::arg("noise") = 0.15, py::arg("seed") = 1);
  m.def(
      "parse_csv",
      [](const std::string& text) {
        const auto result = ingest::parse_csv(text);
        std::vector<std::tuple<std::string, int64_t, double, double>> rows;
        for (const auto& o : result.observations) {
          rows.emplace_back(o.subject_id, o.epoch_seconds, o.lat, o.lon);
        }
        std::vector<std::pair<int, std::string>> errors;
        for (const auto& e : result.errors) errors.emplace_back(e.line, e.message);
        return py::make_tuple(rows, errors);
      },
      py::arg("text"), "Returns ((subject, epoch_seconds, lat, lon) rows, (line, error) rows)");
  m.def(
      "regularize",
      [](const std::vector<std::tuple<std::string, int64_t, double, double>>& rows,
         const std::string& window_start, const std::string& window_end, int max_gap_days,
         double min_coverage) {
        std::vector<ingest::RawObservation> obs;
        for (const auto& [id, secs, lat, lon] : rows) obs.push_back({id, secs, lat, lon});
        return ingest::regularize(obs, ingest::ClipWindow::parse(window_start, window_end),
                                  max_gap_days, min_coverage);
      },
      py::arg("observations"), py::arg("window_start"), py::arg("window_end"),
      py::arg("max_gap_days") = 7, py::arg("min_coverage") = 0.8);
  m.def(
      "kfold",
      [](const ingest::Dataset& ds, int folds, uint64_t seed) {
        std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> out;
        for (const auto& split : ingest::kfold(ds, folds, seed)) {
          out.emplace_back(split.train, split.test);
        }
        return out;
      },
      py::arg("dataset"), py::arg("folds") = 5, py::arg("seed") = 1);
  m.def("select", &ingest::select, py::arg("dataset"), py::arg("ids"));

  // --- region network ---
  py::class_<hng::RegionalizeResult>(m, "RegionNetwork")
      .def_property_readonly("cell_count",
                             [](const hng::RegionalizeResult& r) { return r.network.cells.size(); })
      .def_property_readonly("edge_count",
                             [](const hng::RegionalizeResult& r) { return r.network.edges.size(); })
      .def_property_readonly(
          "cells",
          [](const hng::RegionalizeResult& r) {
            std::vector<std::string> out;
            for (const auto& c : r.network.cells) out.push_back(c.address);
            return out;
          })
      .def_property_readonly(
          "edges",
          [](const hng::RegionalizeResult& r) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& [a, b] : r.network.edges) out.emplace_back(a.address, b.address);
            return out;
          })
      .def_property_readonly(
          "sequences",
          [](const hng::RegionalizeResult& r) {
            std::vector<std::pair<std::string, std::vector<std::string>>> out;
            for (const auto& s : r.sequences) {
              std::vector<std::string> cells;
              for (const auto& c : s.cells) cells.push_back(c.address);
              out.emplace_back(s.trajectory_id, std::move(cells));
            }
            return out;
          })
      .def_property_readonly(
          "warnings",
          [](const hng::RegionalizeResult& r) { return r.network.warnings; })
      .def("to_json", &io::network_to_json);
  m.def("network_from_json", &io::network_from_json, py::arg("json_text"));
  m.def(
      "regionalize",
      [](const ingest::Dataset& ds, double r, int initial_zoom, int max_zoom) {
        return hng::regionalize(ds, r, initial_zoom, max_zoom);
      },
      py::arg("dataset"), py::arg("r") = 1.0, py::arg("initial_zoom") = 2, py::arg("max_zoom") = 9);
  m.def(
      "diameter",
      [](const std::vector<LatLon>& pts) { return hng::diameter(to_points(pts)); },
      py::arg("points"));

  // --- embeddings ---
  py::class_<embed::EmbeddingTable>(m, "EmbeddingTable")
      .def_readonly("dim", &embed::EmbeddingTable::dim)
      .def("__len__", [](const embed::EmbeddingTable& t) { return t.vectors.size(); })
      .def(
          "vector",
          [](const embed::EmbeddingTable& t, const std::string& address) {
            return t.at(cell_from_address(address));
          },
          py::arg("address"));
  m.def(
      "node2vec",
      [](const hng::RegionalizeResult& region, int dim, int walks_per_node, int walk_length,
         int window, int negatives, int epochs, double p, double q, double lr, uint64_t seed) {
        embed::WalkConfig cfg;
        cfg.dim = dim;
        cfg.walks_per_node = walks_per_node;
        cfg.walk_length = walk_length;
        cfg.window = window;
        cfg.negatives = negatives;
        cfg.epochs = epochs;
        cfg.p = p;
        cfg.q = q;
        cfg.lr = lr;
        cfg.seed = seed;
        return embed::node2vec(region.network, cfg).table;
      },
      py::arg("network"), py::arg("dim") = 32, py::arg("walks_per_node") = 20,
      py::arg("walk_length") = 10, py::arg("window") = 5, py::arg("negatives") = 5,
      py::arg("epochs") = 5, py::arg("p") = 1.0, py::arg("q") = 2.0, py::arg("lr") = 0.025,
      py::arg("seed") = 1);

  // --- model ---
  py::class_<vrn::VrnModel>(m, "VrnModel")
      .def_property_readonly("vocabulary",
                             [](const vrn::VrnModel& m_) {
                               std::vector<std::string> out;
                               for (const auto& c : m_.vocabulary) out.push_back(c.address);
                               return out;
                             })
      .def_readonly("epoch_losses", &vrn::VrnModel::epoch_losses)
      .def_readonly("sequence_length_m", &vrn::VrnModel::sequence_length_m);
  py::class_<vrn::LatentDictionary>(m, "LatentDictionary")
      .def("__len__", [](const vrn::LatentDictionary& d) { return d.entries.size(); })
      .def("to_json", &vrn::dictionary_to_json);
  py::class_<sampler::Heatmap>(m, "Heatmap")
      .def("__len__", [](const sampler::Heatmap& h) { return h.regions.size(); })
      .def("to_json", &sampler::heatmap_to_json);
  m.def(
      "train_vrn",
      [](const hng::RegionalizeResult& region, const embed::EmbeddingTable& table, int latent_dim,
         int hidden_dim, int epochs, double lr, double kl_weight, bool normalized_pe, int top_y,
         uint64_t seed) {
        vrn::VrnConfig cfg;
        cfg.latent_dim = latent_dim;
        cfg.hidden_dim = hidden_dim;
        cfg.epochs = epochs;
        cfg.lr = lr;
        cfg.kl_weight = kl_weight;
        cfg.normalized_pe = normalized_pe;
        cfg.top_y = top_y;
        cfg.seed = seed;
        return vrn::train(region.network, region.sequences, table, cfg);
      },
      py::arg("network"), py::arg("embeddings"), py::arg("latent_dim") = 16,
      py::arg("hidden_dim") = 64, py::arg("epochs") = 200, py::arg("lr") = 1e-3,
      py::arg("kl_weight") = 0.0, py::arg("normalized_pe") = false, py::arg("top_y") = 5,
      py::arg("seed") = 1);
  m.def("build_latent_dictionary",
        [](const vrn::VrnModel& model, const hng::RegionalizeResult& region) {
          return vrn::build_latent_dictionary(model, region.network);
        });
  m.def(
      "build_heatmap",
      [](const hng::RegionalizeResult& region, int offset) {
        return sampler::build_heatmap(region.network, offset);
      },
      py::arg("network"), py::arg("offset") = 4);

  // --- generation ---
  py::class_<pipeline::GeneratedTrajectory>(m, "GeneratedTrajectory")
      .def_property_readonly("regions",
                             [](const pipeline::GeneratedTrajectory& g) {
                               std::vector<std::string> out;
                               for (const auto& c : g.regions) out.push_back(c.address);
                               return out;
                             })
      .def_property_readonly(
          "points",
          [](const pipeline::GeneratedTrajectory& g) { return from_points(g.points); })
      .def_readonly("truncated", &pipeline::GeneratedTrajectory::truncated)
      .def_readonly("seed_used", &pipeline::GeneratedTrajectory::seed_used);
  m.def(
      "generate",
      [](const vrn::VrnModel& model, const vrn::LatentDictionary& dict,
         const sampler::Heatmap& heatmap, int count, int m_days, int top_y, uint64_t seed,
         const std::string& rule) {
        pipeline::GenerationConfig cfg;
        cfg.count = count;
        cfg.m = m_days > 0 ? m_days : model.sequence_length_m;
        cfg.top_y = top_y;
        cfg.seed = seed;
        if (rule == "argmax") {
          cfg.rule = pipeline::NextRegionRule::argmax;
        } else if (rule == "sample") {
          cfg.rule = pipeline::NextRegionRule::sample_top_y;
        } else {
          throw ArgumentError("rule must be 'sample' or 'argmax'");
        }
        return pipeline::generate_set(model, dict, heatmap, cfg);
      },
      py::arg("model"), py::arg("dictionary"), py::arg("heatmap"), py::arg("count") = 256,
      py::arg("m") = 0, py::arg("top_y") = 5, py::arg("seed") = 1, py::arg("rule") = "sample");
  m.def("duplicate_bound", &pipeline::duplicate_bound, py::arg("y"), py::arg("m"));
  m.def("log_duplicate_bound", &pipeline::log_duplicate_bound, py::arg("y"), py::arg("m"));
  m.def(
      "duplicate_rate",
      [](const std::vector<pipeline::GeneratedTrajectory>& generated) {
        return pipeline::duplicate_rate(generated);
      },
      py::arg("generated"));

  // --- metrics ---
  m.def(
      "hausdorff",
      [](const std::vector<LatLon>& a, const std::vector<LatLon>& b) {
        return metrics::hausdorff(to_points(a), to_points(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "dtw",
      [](const std::vector<LatLon>& a, const std::vector<LatLon>& b) {
        return metrics::dtw(to_points(a), to_points(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "fde",
      [](const std::vector<LatLon>& a, const std::vector<LatLon>& b) {
        return metrics::fde(to_points(a), to_points(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "evaluate",
      [](const std::vector<std::vector<LatLon>>& generated,
         const std::vector<std::vector<LatLon>>& test, int k, uint64_t seed) {
        return report_dict(metrics::evaluate(to_point_sets(generated), to_point_sets(test), k, seed));
      },
      py::arg("generated"), py::arg("test"), py::arg("k") = 8, py::arg("seed") = 1);

  // --- baseline ---
  py::class_<baselines::LevyParams>(m, "LevyParams")
      .def_readonly("step_scale", &baselines::LevyParams::step_scale)
      .def_readonly("angle_sigma", &baselines::LevyParams::angle_sigma);
  m.def("fit_levy", &baselines::fit_levy, py::arg("dataset"));
  m.def(
      "levy_generate",
      [](const baselines::LevyParams& params, int m_days, int count, uint64_t seed) {
        Rng rng(seed);
        std::vector<std::vector<LatLon>> out;
        for (const auto& t : baselines::levy_generate(params, m_days, count, rng)) {
          out.push_back(from_points(t));
        }
        return out;
      },
      py::arg("params"), py::arg("m"), py::arg("count"), py::arg("seed") = 1);

  // --- experiment ---
  m.def(
      "run_experiment",
      [](const ingest::Dataset& ds, int folds, int repeats, uint64_t seed, double r,
         int generated_count, int vrn_epochs, int kmeans_k, bool with_baseline) {
        experiment::ExperimentConfig cfg;
        cfg.folds = folds;
        cfg.repeats = repeats;
        cfg.master_seed = seed;
        cfg.r = r;
        cfg.generated_count = generated_count;
        cfg.vrn.epochs = vrn_epochs;
        cfg.kmeans_k = kmeans_k;
        cfg.with_baseline = with_baseline;
        return experiment::summary_to_json(experiment::run_experiment(ds, cfg), cfg);
      },
      py::arg("dataset"), py::arg("folds") = 5, py::arg("repeats") = 1, py::arg("seed") = 1,
      py::arg("r") = 1.0, py::arg("generated_count") = 64, py::arg("vrn_epochs") = 50,
      py::arg("kmeans_k") = 8, py::arg("with_baseline") = true,
      "Run the cross-validated protocol; returns the summary report as JSON");
}
