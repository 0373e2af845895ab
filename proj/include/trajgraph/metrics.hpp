#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajgraph/geo.hpp"

namespace trajgraph::metrics {

enum class MetricKind { hausdorff, dtw, fde, embed_sim };

std::string metric_name(MetricKind kind);

double hausdorff(const std::vector<geo::Point>& a, const std::vector<geo::Point>& b);
double dtw(const std::vector<geo::Point>& a, const std::vector<geo::Point>& b);
double fde(const std::vector<geo::Point>& a, const std::vector<geo::Point>& b);

struct MatchReport {
  double mean_value = 0.0;  // mean over generated of the best match value
  double coverage = 0.0;    // fraction of test trajectories that are someone's best match
};

// For each generated trajectory, the closest test trajectory under `kind`
// (ties toward the lowest test index).
MatchReport nearest_match_report(const std::vector<std::vector<geo::Point>>& generated,
                                 const std::vector<std::vector<geo::Point>>& test,
                                 MetricKind kind);

struct KmeansResult {
  std::vector<geo::Point> centroids;
  std::vector<int> assignments;
};

// Lloyd's algorithm, seeded-shuffle init over distinct points, empty clusters
// reseeded to the farthest point. Deterministic per seed.
KmeansResult kmeans(const std::vector<geo::Point>& points, int k, uint64_t seed,
                    int max_iter = 100);

int nearest_centroid(const std::vector<geo::Point>& centroids, const geo::Point& p);

struct LikenessResult {
  std::optional<double> r_coeff;  // empty when a count vector has zero variance
  double chi2 = 0.0;
  int k_used = 0;
  std::vector<int64_t> counts_test;
  std::vector<int64_t> counts_gen;
};

// Cluster-occupancy agreement: k-means is fit on the test points, both point
// sets are histogrammed over the centroids, then Pearson r and a chi-squared
// statistic (generated counts scaled to the test total, denominator floored
// at 1) compare the histograms.
LikenessResult likeness(const std::vector<geo::Point>& test_points,
                        const std::vector<geo::Point>& gen_points, int k, uint64_t seed);

// Externally supplied per-location embedding vectors (nearest-grid lookup).
struct LocationEmbeddings {
  int dim = 0;
  std::vector<std::pair<geo::Point, std::vector<double>>> entries;

  const std::vector<double>& nearest(const geo::Point& p) const;
};

// Parses CSV rows of "lat,lon,v0,...,v{d-1}" (no header required; a header
// row is skipped if non-numeric).
LocationEmbeddings parse_location_embeddings(std::string_view csv_text);

double embed_similarity(const std::vector<geo::Point>& traj_a,
                        const std::vector<geo::Point>& traj_b,
                        const LocationEmbeddings& table);

MatchReport embed_nearest_match(const std::vector<std::vector<geo::Point>>& generated,
                                const std::vector<std::vector<geo::Point>>& test,
                                const LocationEmbeddings& table);

struct EvalReport {
  std::map<std::string, MatchReport> distance;  // hausdorff, dtw, fde, embed_sim?
  std::optional<double> r_coeff;
  double chi2 = 0.0;
  int k_used = 0;
  std::vector<int64_t> counts_test;
  std::vector<int64_t> counts_gen;
};

// Full harness over trajectory point lists. The embedding table is optional;
// when absent the embed_sim column is omitted.
EvalReport evaluate(const std::vector<std::vector<geo::Point>>& generated,
                    const std::vector<std::vector<geo::Point>>& test, int k, uint64_t seed,
                    const LocationEmbeddings* embeddings = nullptr);

std::string report_to_json(const EvalReport& report);

// Plain-text table, one row per method.
std::string format_report_table(const std::vector<std::pair<std::string, EvalReport>>& rows);

}  // namespace trajgraph::metrics
