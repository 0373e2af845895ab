// Acceptance suite: runs every toolkit-level criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exit code is
// nonzero if any required criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

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

using namespace trajgraph;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- 1. metric oracles -------------------------------------------------

double hausdorff_oracle(const std::vector<geo::Point>& a, const std::vector<geo::Point>& b) {
  auto directed = [](const std::vector<geo::Point>& x, const std::vector<geo::Point>& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) best = std::min(best, geo::euclidean_deg(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double dtw_oracle(const std::vector<geo::Point>& a, const std::vector<geo::Point>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<double>> dp(n, std::vector<double>(m, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      const double cost = geo::euclidean_deg(a[i], b[j]);
      double best = std::numeric_limits<double>::infinity();
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        if (i > 0) best = std::min(best, dp[i - 1][j]);
        if (j > 0) best = std::min(best, dp[i][j - 1]);
        if (i > 0 && j > 0) best = std::min(best, dp[i - 1][j - 1]);
      }
      dp[i][j] = cost + best;
    }
  }
  return dp[n - 1][m - 1];
}

Criterion check_metric_oracles() {
  const auto start = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<geo::Point> a(1 + rng.uniform_int(15)), b(1 + rng.uniform_int(15));
    for (auto& p : a) p = {rng.uniform(-60, 60), rng.uniform(-120, 120)};
    for (auto& p : b) p = {rng.uniform(-60, 60), rng.uniform(-120, 120)};
    worst = std::max(worst, std::abs(metrics::hausdorff(a, b) - hausdorff_oracle(a, b)));
    worst = std::max(worst, std::abs(metrics::dtw(a, b) - dtw_oracle(a, b)));
  }
  const double elapsed = seconds_since(start);
  Criterion c;
  c.pass = worst <= 1e-9 && elapsed < 5.0;
  std::ostringstream detail;
  detail << "max abs diff " << worst << " over 200 pairs, " << elapsed << " s";
  c.detail = detail.str();
  return c;
}

// --- 2. gradient correctness -------------------------------------------

Criterion check_vrn_gradient() {
  constexpr int kVocab = 12, kDim = 8, kLatent = 4, kHidden = 16;
  Rng rng(202);
  embed::EmbeddingTable table;
  table.dim = kDim;
  std::vector<geo::CellId> vocab;
  for (int i = 0; i < kVocab; ++i) {
    const geo::CellId c = geo::cell_of({rng.uniform(-80, 80), rng.uniform(-170, 170)}, 6);
    if (table.vectors.count(c)) continue;
    std::vector<double> v(kDim);
    for (double& x : v) x = rng.uniform(-1, 1);
    vocab.push_back(c);
    table.vectors[c] = v;
  }
  nn::Mlp encoder = nn::make_mlp({kDim, kHidden, kLatent}, rng);
  nn::Mlp decoder = nn::make_mlp({kDim + kLatent + 1, kHidden, static_cast<int>(vocab.size())}, rng);

  const int src = 0, dst = 1 % static_cast<int>(vocab.size());
  const double pe = 3.0;
  const auto& src_emb = table.at(vocab[src]);
  const auto& dst_emb = table.at(vocab[dst]);

  auto loss_of = [&]() {
    const auto z = nn::forward(encoder, dst_emb);
    std::vector<double> dec_in = src_emb;
    dec_in.insert(dec_in.end(), z.begin(), z.end());
    dec_in.push_back(pe);
    return nn::softmax_xent(nn::forward(decoder, dec_in), dst).loss;
  };

  // analytic gradient of the full loss through decoder and encoder
  const auto enc_trace = nn::forward_trace(encoder, dst_emb);
  std::vector<double> dec_in = src_emb;
  dec_in.insert(dec_in.end(), enc_trace.output.begin(), enc_trace.output.end());
  dec_in.push_back(pe);
  const auto dec_trace = nn::forward_trace(decoder, dec_in);
  const auto sm = nn::softmax_xent(dec_trace.output, dst);
  const auto dec_grads = nn::backward(decoder, dec_trace, sm.logit_grad);
  const std::vector<double> dz(dec_grads.input.begin() + kDim,
                               dec_grads.input.begin() + kDim + kLatent);
  const auto enc_grads = nn::backward(encoder, enc_trace, dz);

  const double h = 1e-5;
  double worst_rel = 0.0;
  auto check_blocks = [&](nn::Mlp& mlp, const nn::Gradients& grads) {
    for (size_t l = 0; l < mlp.layer_count(); ++l) {
      for (auto [params, analytic] :
           {std::pair{&mlp.weights[l], &grads.weights[l]}, std::pair{&mlp.biases[l], &grads.biases[l]}}) {
        for (size_t i = 0; i < params->size(); ++i) {
          const double saved = (*params)[i];
          (*params)[i] = saved + h;
          const double up = loss_of();
          (*params)[i] = saved - h;
          const double down = loss_of();
          (*params)[i] = saved;
          const double numeric = (up - down) / (2.0 * h);
          const double a = (*analytic)[i];
          const double rel = std::abs(numeric - a) / std::max({std::abs(numeric), std::abs(a), 1e-8});
          worst_rel = std::max(worst_rel, rel);
        }
      }
    }
  };
  check_blocks(decoder, dec_grads);
  check_blocks(encoder, enc_grads);

  Criterion c;
  c.pass = worst_rel < 1e-4;
  std::ostringstream detail;
  detail << "worst relative error " << worst_rel << " over "
         << "encoder+decoder parameters";
  c.detail = detail.str();
  return c;
}

// --- 3. HNG invariants ---------------------------------------------------

Criterion check_hng_invariants(const ingest::Dataset& corridor) {
  size_t total_points = 0;
  for (const auto& t : corridor.trajectories) total_points += t.points.size();

  size_t prev_cells = 0;
  bool ok = true;
  std::ostringstream detail;
  // r descending: a tighter threshold must never coarsen the network
  for (double r : {2.0, 1.0, 0.5, 0.25}) {
    const auto result = hng::regionalize(corridor, r, 2, 12);
    size_t points_in_cells = 0;
    for (const auto& [cell, pts] : result.network.points_by_cell) {
      points_in_cells += pts.size();
      if (cell.resolution < result.network.max_zoom && hng::diameter(pts) > r) {
        ok = false;
        detail << "diameter bound violated at r=" << r << "; ";
      }
    }
    if (points_in_cells != total_points) {
      ok = false;
      detail << "conservation violated at r=" << r << "; ";
    }
    if (result.network.cells.size() < prev_cells) {
      ok = false;
      detail << "cell count decreased when tightening to r=" << r << "; ";
    }
    prev_cells = result.network.cells.size();
    detail << "r=" << r << ": " << result.network.cells.size() << " cells; ";
  }
  Criterion c;
  c.pass = ok;
  c.detail = detail.str();
  return c;
}

// --- shared trained stack ------------------------------------------------

struct Stack {
  hng::RegionalizeResult region;
  embed::SkipgramResult embedding;
  vrn::VrnModel model;
  vrn::LatentDictionary dict;
  sampler::Heatmap heatmap;
};

Stack train_stack(const ingest::Dataset& ds, int epochs, uint64_t seed) {
  Stack s;
  s.region = hng::regionalize(ds, 1.0, 2, 9);
  embed::WalkConfig walk;
  walk.seed = stable_seed(seed, "walk");
  s.embedding = embed::node2vec(s.region.network, walk);
  vrn::VrnConfig cfg;
  cfg.epochs = epochs;
  cfg.seed = stable_seed(seed, "vrn");
  s.model = vrn::train(s.region.network, s.region.sequences, s.embedding.table, cfg);
  s.dict = vrn::build_latent_dictionary(s.model, s.region.network);
  s.heatmap = sampler::build_heatmap(s.region.network);
  return s;
}

// --- 4. duplicate probability ---------------------------------------------

Criterion check_duplicates(const Stack& stack) {
  const auto start = Clock::now();
  Criterion c;
  if (pipeline::duplicate_bound(2, 10) != 1.0 / 1024.0) {
    c.detail = "duplicate_bound(2,10) != 1/1024";
    return c;
  }
  pipeline::GenerationConfig cfg;
  cfg.count = 500;
  cfg.m = 60;
  cfg.top_y = 5;
  cfg.seed = 404;
  const auto generated = pipeline::generate_set(stack.model, stack.dict, stack.heatmap, cfg);
  const double rate = pipeline::duplicate_rate(generated);
  const double elapsed = seconds_since(start);
  c.pass = rate == 0.0 && elapsed < 120.0;
  std::ostringstream detail;
  detail << "bound(2,10)=1/1024 exact; duplicate rate " << rate << " over 500 trajectories, "
         << elapsed << " s";
  c.detail = detail.str();
  return c;
}

// --- 5. self likeness ------------------------------------------------------

Criterion check_self_likeness(const ingest::Dataset& corridor) {
  std::vector<geo::Point> points;
  for (const auto& t : corridor.trajectories) {
    points.insert(points.end(), t.points.begin(), t.points.end());
  }
  const auto result = metrics::likeness(points, points, 8, 505);
  Criterion c;
  std::ostringstream detail;
  if (!result.r_coeff) {
    c.detail = "r undefined (zero-variance counts)";
    return c;
  }
  c.pass = std::abs(*result.r_coeff - 1.0) <= 1e-9 && result.chi2 == 0.0;
  detail << "r=" << *result.r_coeff << " chi2=" << result.chi2;
  c.detail = detail.str();
  return c;
}

// --- 6. end-to-end dominance ------------------------------------------------

Criterion check_dominance(const ingest::Dataset& corridor, experiment::ExperimentSummary& out) {
  const auto start = Clock::now();
  experiment::ExperimentConfig cfg;
  cfg.folds = 5;
  cfg.repeats = 1;
  cfg.master_seed = 606;
  cfg.generated_count = 256;
  cfg.vrn.epochs = 150;
  cfg.kmeans_k = 8;
  out = experiment::run_experiment(corridor, cfg);
  const double elapsed = seconds_since(start);

  const auto& model = out.model_mean;
  const auto& levy = *out.levy_mean;
  const double mh = model.distance.at("hausdorff").mean_value;
  const double lh = levy.distance.at("hausdorff").mean_value;
  const double md = model.distance.at("dtw").mean_value;
  const double ld = levy.distance.at("dtw").mean_value;
  const double mc = model.distance.at("hausdorff").coverage;
  const double lc = levy.distance.at("hausdorff").coverage;

  Criterion c;
  c.pass = mh < lh && md < ld && mc >= lc + 0.2 && elapsed < 900.0;
  std::ostringstream detail;
  detail << "hausdorff " << mh << " vs levy " << lh << "; dtw " << md << " vs " << ld
         << "; coverage " << mc << " vs " << lc << "; " << elapsed << " s";
  c.detail = detail.str();
  return c;
}

// --- 7. determinism ----------------------------------------------------------

Criterion check_determinism() {
  const auto ds = synth::corridor_dataset(20, 20, 0.15, 707);
  experiment::ExperimentConfig cfg;
  cfg.folds = 5;
  cfg.repeats = 1;
  cfg.master_seed = 708;
  cfg.generated_count = 16;
  cfg.kmeans_k = 3;
  cfg.vrn.epochs = 20;
  cfg.walk.epochs = 2;
  const auto a = experiment::summary_to_json(experiment::run_experiment(ds, cfg), cfg);
  const auto b = experiment::summary_to_json(experiment::run_experiment(ds, cfg), cfg);
  Criterion c;
  c.pass = a == b;
  c.detail = c.pass ? "two runs produced byte-identical summaries"
                    : "summaries differ between identically-seeded runs";
  return c;
}

// --- 8. sampler statistics -----------------------------------------------------

Criterion check_sampler_stats(const Stack& stack) {
  // the region with the most dots gives the strongest multinomial test
  const geo::CellId* region = nullptr;
  size_t most_dots = 0;
  for (const auto& [cell, dots] : stack.heatmap.regions) {
    if (dots.size() > most_dots) {
      most_dots = dots.size();
      region = &cell;
    }
  }
  Criterion c;
  if (region == nullptr || most_dots < 2) {
    c.detail = "no region with at least 2 dots";
    return c;
  }
  const auto& dots = stack.heatmap.regions.at(*region);
  int64_t total = 0;
  for (const auto& d : dots) total += d.count;

  Rng rng(808);
  const int n = 10000;
  std::map<std::string, int> hits;
  int contained = 0;
  for (int i = 0; i < n; ++i) {
    const geo::Point p = sampler::sample_point(*region, stack.heatmap, rng);
    if (geo::cell_of(p, region->resolution) == *region) ++contained;
    ++hits[geo::cell_of(p, dots.front().cell.resolution).address];
  }
  bool within = true;
  double worst_dev = 0.0;
  for (const auto& d : dots) {
    const double prob = static_cast<double>(d.count) / static_cast<double>(total);
    const double freq = static_cast<double>(hits[d.cell.address]) / n;
    const double sigma = std::sqrt(std::max(prob * (1.0 - prob) / n, 1e-12));
    worst_dev = std::max(worst_dev, std::abs(freq - prob) / sigma);
    if (std::abs(freq - prob) > 3.0 * sigma) within = false;
  }
  c.pass = within && contained == n;
  std::ostringstream detail;
  detail << most_dots << " dots, worst deviation " << worst_dev << " sigma, containment "
         << contained << "/" << n;
  c.detail = detail.str();
  return c;
}

// --- 9. optional movebank run ---------------------------------------------------

Criterion check_movebank() {
  Criterion c;
  const char* path = std::getenv("TRAJGRAPH_MOVEBANK_CSV");
  if (path == nullptr) {
    c.skipped = true;
    c.pass = true;
    c.detail = "set TRAJGRAPH_MOVEBANK_CSV to a CSV export to enable";
    return c;
  }
  const char* window = std::getenv("TRAJGRAPH_MOVEBANK_WINDOW");
  std::string start = "03-01", end = "09-01";
  if (window != nullptr) {
    const std::string w = window;
    const auto colon = w.find(':');
    if (colon == std::string::npos) {
      c.detail = "TRAJGRAPH_MOVEBANK_WINDOW must be MM-DD:MM-DD";
      return c;
    }
    start = w.substr(0, colon);
    end = w.substr(colon + 1);
  }
  const auto parsed = ingest::parse_csv(io::read_file(path));
  const auto ds = ingest::regularize(parsed.observations, ingest::ClipWindow::parse(start, end));
  experiment::ExperimentConfig cfg;
  cfg.folds = 5;
  cfg.repeats = 1;
  cfg.master_seed = 909;
  cfg.generated_count = 256;
  cfg.vrn.epochs = 150;
  cfg.kmeans_k = 8;
  const auto summary = experiment::run_experiment(ds, cfg, &std::cerr);
  const double cov = summary.model_mean.distance.at("hausdorff").coverage;
  c.pass = cov >= 0.7;
  std::ostringstream detail;
  detail << ds.trajectories.size() << " trajectories of " << ds.m
         << " days; hausdorff coverage " << cov;
  c.detail = detail.str();
  return c;
}

}  // namespace

int main() {
  const auto corridor = synth::corridor_dataset(60, 60, 0.15, 20240809);

  std::cout << "building shared corridor model (n=60, m=60)...\n";
  const Stack stack = train_stack(corridor, 120, 303);

  experiment::ExperimentSummary dominance_summary;
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria = {
      {"1. metric oracles (hausdorff/dtw vs brute force)", [] { return check_metric_oracles(); }},
      {"2. VRN gradient vs central finite differences", [] { return check_vrn_gradient(); }},
      {"3. HNG invariants over r in {0.25,0.5,1,2}",
       [&] { return check_hng_invariants(corridor); }},
      {"4. duplicate bound and empirical duplicate rate", [&] { return check_duplicates(stack); }},
      {"5. self-likeness (r=1, chi2=0)", [&] { return check_self_likeness(corridor); }},
      {"6. end-to-end dominance over Levy Flight (5-fold)",
       [&] { return check_dominance(corridor, dominance_summary); }},
      {"7. experiment determinism (bitwise summary)", [] { return check_determinism(); }},
      {"8. occupancy sampler statistics", [&] { return check_sampler_stats(stack); }},
      {"9. optional movebank pipeline", [] { return check_movebank(); }},
  };

  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Criterion result;
    try {
      result = run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const char* tag = result.skipped ? "SKIP" : (result.pass ? "PASS" : "FAIL");
    std::cout << "[" << tag << "] " << name << " — " << result.detail << "\n";
    if (!result.pass && !result.skipped) ++failures;
  }

  if (dominance_summary.levy_mean) {
    std::cout << "\nfold-averaged results (synthetic corridor):\n"
              << metrics::format_report_table({{"model", dominance_summary.model_mean},
                                               {"levy_flight", *dominance_summary.levy_mean}});
  }
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
