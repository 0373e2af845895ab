#include "trajgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "trajgraph/errors.hpp"
#include "trajgraph/rng.hpp"

namespace trajgraph::metrics {

using nlohmann::json;

std::string metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::hausdorff: return "hausdorff";
    case MetricKind::dtw: return "dtw";
    case MetricKind::fde: return "fde";
    case MetricKind::embed_sim: return "embed_sim";
  }
  return "?";
}

namespace {

void require_non_empty(const std::vector<geo::Point>& pts, const char* side) {
  if (pts.empty()) {
    throw ArgumentError(std::string("empty point list (") + side + ")");
  }
}

double directed_hausdorff(const std::vector<geo::Point>& x, const std::vector<geo::Point>& y) {
  double worst = 0.0;
  for (const auto& p : x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : y) {
      best = std::min(best, geo::euclidean_deg(p, q));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double hausdorff(const std::vector<geo::Point>& a, const std::vector<geo::Point>& b) {
  require_non_empty(a, "a");
  require_non_empty(b, "b");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double dtw(const std::vector<geo::Point>& a, const std::vector<geo::Point>& b) {
  require_non_empty(a, "a");
  require_non_empty(b, "b");
  const size_t n = a.size(), m = b.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = kInf;
    for (size_t j = 1; j <= m; ++j) {
      const double cost = geo::euclidean_deg(a[i - 1], b[j - 1]);
      cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double fde(const std::vector<geo::Point>& a, const std::vector<geo::Point>& b) {
  require_non_empty(a, "a");
  require_non_empty(b, "b");
  return geo::euclidean_deg(a.back(), b.back());
}

MatchReport nearest_match_report(const std::vector<std::vector<geo::Point>>& generated,
                                 const std::vector<std::vector<geo::Point>>& test,
                                 MetricKind kind) {
  if (generated.empty() || test.empty()) {
    throw ArgumentError("nearest_match_report needs non-empty sets");
  }
  double (*dist)(const std::vector<geo::Point>&, const std::vector<geo::Point>&) = nullptr;
  switch (kind) {
    case MetricKind::hausdorff: dist = hausdorff; break;
    case MetricKind::dtw: dist = dtw; break;
    case MetricKind::fde: dist = fde; break;
    case MetricKind::embed_sim:
      throw ArgumentError("embed_sim needs an embedding table; use embed_nearest_match");
  }
  MatchReport report;
  std::set<size_t> covered;
  double sum = 0.0;
  for (const auto& gen : generated) {
    double best = std::numeric_limits<double>::infinity();
    size_t best_j = 0;
    for (size_t j = 0; j < test.size(); ++j) {
      const double d = dist(gen, test[j]);
      if (d < best) {  // strict: ties keep the lowest index
        best = d;
        best_j = j;
      }
    }
    covered.insert(best_j);
    sum += best;
  }
  report.mean_value = sum / generated.size();
  report.coverage = static_cast<double>(covered.size()) / test.size();
  return report;
}

int nearest_centroid(const std::vector<geo::Point>& centroids, const geo::Point& p) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < centroids.size(); ++c) {
    const double d = geo::euclidean_deg(centroids[c], p);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

KmeansResult kmeans(const std::vector<geo::Point>& points, int k, uint64_t seed, int max_iter) {
  if (k < 1 || points.size() < static_cast<size_t>(k)) {
    throw ArgumentError("kmeans needs at least k points");
  }
  // init: k distinct points drawn by seeded shuffle
  std::vector<size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_int(i)]);
  }
  std::vector<geo::Point> centroids;
  for (size_t idx : order) {
    const geo::Point& cand = points[idx];
    if (std::none_of(centroids.begin(), centroids.end(),
                     [&](const geo::Point& c) { return c == cand; })) {
      centroids.push_back(cand);
      if (static_cast<int>(centroids.size()) == k) break;
    }
  }
  if (static_cast<int>(centroids.size()) < k) {
    throw ArgumentError("kmeans needs at least k distinct points");
  }

  KmeansResult result;
  result.centroids = std::move(centroids);
  result.assignments.assign(points.size(), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (size_t i = 0; i < points.size(); ++i) {
      const int c = nearest_centroid(result.centroids, points[i]);
      if (c != result.assignments[i]) {
        result.assignments[i] = c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::vector<double> lat(k, 0.0), lon(k, 0.0);
    std::vector<int64_t> count(k, 0);
    for (size_t i = 0; i < points.size(); ++i) {
      const int c = result.assignments[i];
      lat[c] += points[i].lat;
      lon[c] += points[i].lon;
      ++count[c];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) {
        result.centroids[c] = {lat[c] / count[c], lon[c] / count[c]};
      } else {
        // reseed an empty cluster to the point farthest from its centroid
        double worst = -1.0;
        size_t worst_i = 0;
        for (size_t i = 0; i < points.size(); ++i) {
          const double d = geo::euclidean_deg(points[i], result.centroids[result.assignments[i]]);
          if (d > worst) {
            worst = d;
            worst_i = i;
          }
        }
        result.centroids[c] = points[worst_i];
      }
    }
  }
  return result;
}

namespace {

std::optional<double> pearson(const std::vector<int64_t>& x, const std::vector<int64_t>& y) {
  const size_t n = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += static_cast<double>(x[i]);
    my += static_cast<double>(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    return std::nullopt;  // undefined, reported as a sentinel rather than NaN
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

LikenessResult likeness(const std::vector<geo::Point>& test_points,
                        const std::vector<geo::Point>& gen_points, int k, uint64_t seed) {
  if (gen_points.empty()) {
    throw ArgumentError("likeness needs generated points");
  }
  const KmeansResult clusters = kmeans(test_points, k, seed);
  LikenessResult result;
  result.k_used = k;
  result.counts_test.assign(k, 0);
  result.counts_gen.assign(k, 0);
  for (int a : clusters.assignments) {
    ++result.counts_test[a];
  }
  for (const auto& p : gen_points) {
    ++result.counts_gen[nearest_centroid(clusters.centroids, p)];
  }
  result.r_coeff = pearson(result.counts_test, result.counts_gen);

  const double total_test = static_cast<double>(test_points.size());
  const double total_gen = static_cast<double>(gen_points.size());
  const double scale = total_test / total_gen;
  double chi2 = 0.0;
  for (int c = 0; c < k; ++c) {
    const double expected = static_cast<double>(result.counts_test[c]);
    const double scaled_gen = result.counts_gen[c] * scale;
    const double diff = scaled_gen - expected;
    chi2 += diff * diff / std::max(expected, 1.0);
  }
  result.chi2 = chi2;
  return result;
}

const std::vector<double>& LocationEmbeddings::nearest(const geo::Point& p) const {
  if (entries.empty()) {
    throw UnavailableMetricError("location embedding table is empty");
  }
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < entries.size(); ++i) {
    const double d = geo::euclidean_deg(entries[i].first, p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return entries[best].second;
}

LocationEmbeddings parse_location_embeddings(std::string_view csv_text) {
  LocationEmbeddings table;
  std::istringstream in{std::string(csv_text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    std::vector<double> values;
    bool numeric = true;
    while (std::getline(fields, field, ',')) {
      try {
        size_t pos = 0;
        values.push_back(std::stod(field, &pos));
        if (pos != field.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) continue;  // header or junk row
    if (values.size() < 3) {
      throw ParseError("location embedding rows need lat, lon and at least one value");
    }
    geo::Point p{values[0], values[1]};
    geo::require_valid(p);
    std::vector<double> vec(values.begin() + 2, values.end());
    if (table.dim == 0) {
      table.dim = static_cast<int>(vec.size());
    } else if (static_cast<int>(vec.size()) != table.dim) {
      throw ParseError("inconsistent embedding width in location table");
    }
    table.entries.emplace_back(p, std::move(vec));
  }
  if (table.entries.empty()) {
    throw UnavailableMetricError("location embedding table has no usable rows");
  }
  return table;
}

namespace {

std::vector<double> mean_trajectory_embedding(const std::vector<geo::Point>& traj,
                                              const LocationEmbeddings& table) {
  std::vector<double> mean(table.dim, 0.0);
  for (const auto& p : traj) {
    const auto& e = table.nearest(p);
    for (int d = 0; d < table.dim; ++d) mean[d] += e[d];
  }
  for (double& v : mean) v /= static_cast<double>(traj.size());
  return mean;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double embed_similarity(const std::vector<geo::Point>& traj_a,
                        const std::vector<geo::Point>& traj_b, const LocationEmbeddings& table) {
  require_non_empty(traj_a, "a");
  require_non_empty(traj_b, "b");
  return cosine(mean_trajectory_embedding(traj_a, table), mean_trajectory_embedding(traj_b, table));
}

MatchReport embed_nearest_match(const std::vector<std::vector<geo::Point>>& generated,
                                const std::vector<std::vector<geo::Point>>& test,
                                const LocationEmbeddings& table) {
  if (generated.empty() || test.empty()) {
    throw ArgumentError("embed_nearest_match needs non-empty sets");
  }
  MatchReport report;
  std::set<size_t> covered;
  double sum = 0.0;
  for (const auto& gen : generated) {
    double best = -std::numeric_limits<double>::infinity();
    size_t best_j = 0;
    for (size_t j = 0; j < test.size(); ++j) {
      const double s = embed_similarity(gen, test[j], table);
      if (s > best) {  // similarity: the optimum is a maximum
        best = s;
        best_j = j;
      }
    }
    covered.insert(best_j);
    sum += best;
  }
  report.mean_value = sum / generated.size();
  report.coverage = static_cast<double>(covered.size()) / test.size();
  return report;
}

EvalReport evaluate(const std::vector<std::vector<geo::Point>>& generated,
                    const std::vector<std::vector<geo::Point>>& test, int k, uint64_t seed,
                    const LocationEmbeddings* embeddings) {
  EvalReport report;
  for (MetricKind kind : {MetricKind::hausdorff, MetricKind::dtw, MetricKind::fde}) {
    report.distance[metric_name(kind)] = nearest_match_report(generated, test, kind);
  }
  if (embeddings != nullptr) {
    report.distance["embed_sim"] = embed_nearest_match(generated, test, *embeddings);
  }
  std::vector<geo::Point> test_points, gen_points;
  for (const auto& t : test) test_points.insert(test_points.end(), t.begin(), t.end());
  for (const auto& g : generated) gen_points.insert(gen_points.end(), g.begin(), g.end());
  const LikenessResult like = likeness(test_points, gen_points, k, seed);
  report.r_coeff = like.r_coeff;
  report.chi2 = like.chi2;
  report.k_used = like.k_used;
  report.counts_test = like.counts_test;
  report.counts_gen = like.counts_gen;
  return report;
}

std::string report_to_json(const EvalReport& report) {
  json j;
  for (const auto& [name, match] : report.distance) {
    j["distance"][name] = {{"mean_value", match.mean_value}, {"coverage", match.coverage}};
  }
  if (report.r_coeff) {
    j["r_coeff"] = *report.r_coeff;
  } else {
    j["r_coeff"] = nullptr;
  }
  j["chi2"] = report.chi2;
  j["k_used"] = report.k_used;
  j["counts_test"] = report.counts_test;
  j["counts_gen"] = report.counts_gen;
  return j.dump(2);
}

std::string format_report_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::ostringstream out;
  const bool any_embed = std::any_of(rows.begin(), rows.end(), [](const auto& r) {
    return r.second.distance.count("embed_sim") > 0;
  });
  out << "Method            Hausdorff   cov     DTW        cov     FDE       cov   ";
  if (any_embed) out << "  EmbedSim  cov   ";
  out << "  r-Coeff    chi2\n";
  char buf[256];
  for (const auto& [name, report] : rows) {
    auto d = [&](const char* key) -> const MatchReport& {
      static const MatchReport empty;
      const auto it = report.distance.find(key);
      return it == report.distance.end() ? empty : it->second;
    };
    std::snprintf(buf, sizeof(buf), "%-16s %9.3f %5.2f  %9.3f %5.2f  %8.3f %5.2f  ", name.c_str(),
                  d("hausdorff").mean_value, d("hausdorff").coverage, d("dtw").mean_value,
                  d("dtw").coverage, d("fde").mean_value, d("fde").coverage);
    out << buf;
    if (any_embed) {
      if (report.distance.count("embed_sim")) {
        std::snprintf(buf, sizeof(buf), "%9.3f %5.2f  ", d("embed_sim").mean_value,
                      d("embed_sim").coverage);
      } else {
        std::snprintf(buf, sizeof(buf), "%9s %5s  ", "-", "-");
      }
      out << buf;
    }
    if (report.r_coeff) {
      std::snprintf(buf, sizeof(buf), "%9.3f %9.1f\n", *report.r_coeff, report.chi2);
    } else {
      std::snprintf(buf, sizeof(buf), "%9s %9.1f\n", "undef", report.chi2);
    }
    out << buf;
  }
  return out.str();
}

}  // namespace trajgraph::metrics
