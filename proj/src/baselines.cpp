#include "trajgraph/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "trajgraph/errors.hpp"

namespace trajgraph::baselines {

std::vector<double> turning_angles(const std::vector<geo::Point>& points) {
  std::vector<double> headings;
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    const double dlat = points[i + 1].lat - points[i].lat;
    const double dlon = points[i + 1].lon - points[i].lon;
    if (dlat == 0.0 && dlon == 0.0) continue;  // heading undefined for zero steps
    headings.push_back(std::atan2(dlat, dlon));
  }
  std::vector<double> turns;
  for (size_t i = 0; i + 1 < headings.size(); ++i) {
    double turn = headings[i + 1] - headings[i];
    while (turn > M_PI) turn -= 2.0 * M_PI;
    while (turn <= -M_PI) turn += 2.0 * M_PI;
    turns.push_back(turn);
  }
  return turns;
}

LevyParams fit_levy(const ingest::Dataset& dataset) {
  if (dataset.trajectories.empty() || dataset.m < 2) {
    throw ArgumentError("fit_levy needs a dataset with m >= 2");
  }
  LevyParams params;
  std::vector<double> steps;
  std::vector<double> turns;
  for (const auto& traj : dataset.trajectories) {
    params.start_distribution.push_back(traj.points.front());
    for (size_t i = 0; i + 1 < traj.points.size(); ++i) {
      steps.push_back(geo::euclidean_deg(traj.points[i], traj.points[i + 1]));
    }
    const auto t = turning_angles(traj.points);
    turns.insert(turns.end(), t.begin(), t.end());
  }

  std::sort(steps.begin(), steps.end());
  const size_t n = steps.size();
  const double median = n % 2 == 1 ? steps[n / 2] : 0.5 * (steps[n / 2 - 1] + steps[n / 2]);
  params.step_scale = std::max(median, 1e-9);

  if (!turns.empty()) {
    double c = 0.0, s = 0.0;
    for (double t : turns) {
      c += std::cos(t);
      s += std::sin(t);
    }
    c /= turns.size();
    s /= turns.size();
    const double r = std::max(std::sqrt(c * c + s * s), 1e-12);
    params.angle_sigma = r >= 1.0 ? 0.0 : std::sqrt(-2.0 * std::log(r));
  }
  return params;
}

std::vector<std::vector<geo::Point>> levy_generate(const LevyParams& params, int m, int count,
                                                   Rng& rng) {
  if (m < 2 || count < 1) {
    throw ArgumentError("levy_generate needs m >= 2 and count >= 1");
  }
  if (params.start_distribution.empty() || params.step_scale <= 0.0) {
    throw ArgumentError("levy params are not fitted");
  }
  std::vector<std::vector<geo::Point>> out;
  out.reserve(count);
  for (int t = 0; t < count; ++t) {
    std::vector<geo::Point> traj;
    traj.reserve(m);
    geo::Point p = params.start_distribution[rng.uniform_int(params.start_distribution.size())];
    traj.push_back(p);
    double heading = rng.uniform(-M_PI, M_PI);
    for (int step = 1; step < m; ++step) {
      heading += rng.normal(0.0, params.angle_sigma);
      const double len =
          std::min(std::abs(rng.cauchy(0.0, params.step_scale)), 10.0 * params.step_scale);
      p.lat = std::clamp(p.lat + len * std::sin(heading), -90.0, 90.0);
      p.lon = std::clamp(p.lon + len * std::cos(heading), -180.0, 180.0);
      traj.push_back(p);
    }
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace trajgraph::baselines
