#include "trajgraph/synth.hpp"

#include <algorithm>
#include <cmath>

#include "trajgraph/errors.hpp"
#include "trajgraph/rng.hpp"

namespace trajgraph::synth {

CorridorSpec CorridorSpec::default_spec() {
  return CorridorSpec{{{44.0, 4.0}, {47.0, 8.0}, {49.0, 13.0}, {53.0, 15.0}, {57.0, 14.0},
                       {60.0, 10.0}}};
}

double CorridorSpec::arc_length() const {
  double total = 0.0;
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    total += geo::euclidean_deg(waypoints[i], waypoints[i + 1]);
  }
  return total;
}

double CorridorSpec::displacement() const {
  return geo::euclidean_deg(waypoints.front(), waypoints.back());
}

geo::Point CorridorSpec::at(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  double target = u * arc_length();
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const double seg = geo::euclidean_deg(waypoints[i], waypoints[i + 1]);
    if (target <= seg || i + 2 == waypoints.size()) {
      const double f = seg > 0.0 ? std::clamp(target / seg, 0.0, 1.0) : 0.0;
      return geo::Point{waypoints[i].lat + f * (waypoints[i + 1].lat - waypoints[i].lat),
                        waypoints[i].lon + f * (waypoints[i + 1].lon - waypoints[i].lon)};
    }
    target -= seg;
  }
  return waypoints.back();
}

ingest::Dataset corridor_dataset(int subjects, int length_m, double noise_deg, uint64_t seed,
                                 const CorridorSpec& spec) {
  if (subjects < 1 || length_m < 2) {
    throw ArgumentError("corridor dataset needs subjects >= 1 and m >= 2");
  }
  if (length_m > 300) {
    throw ArgumentError("corridor dataset supports m <= 300");
  }
  if (spec.waypoints.size() < 2) {
    throw ArgumentError("corridor spec needs at least 2 waypoints");
  }
  for (const auto& w : spec.waypoints) geo::require_valid(w);

  const int64_t start_day = ingest::day_number(2020, 3, 1);
  int end_year, end_month, end_day;
  ingest::civil_from_day_number(start_day + length_m - 1, end_year, end_month, end_day);

  ingest::Dataset ds;
  ds.m = length_m;
  ds.clip_window = ingest::ClipWindow{3, 1, end_month, end_day};

  for (int s = 0; s < subjects; ++s) {
    Rng rng(stable_seed(seed, "synth-subject", static_cast<uint64_t>(s)));
    // Seasonal schedule like a real migration window: residence at the start
    // site, a migration leg, then residence near the destination. Subjects
    // differ in departure, duration, seasonal reach along the corridor, and
    // carry a small route offset, so no two share an endpoint.
    const bool jitter = noise_deg > 0.0;
    const double reach = jitter ? 0.79 + 0.19 * rng.uniform(-1.0, 1.0) : 1.0;
    const double head = 0.30 * (jitter ? 1.0 + 0.3 * rng.uniform(-1.0, 1.0) : 1.0);
    const double leg = 0.40 * (jitter ? 1.0 + 0.3 * rng.uniform(-1.0, 1.0) : 1.0);
    const double route_dlat = jitter ? rng.normal(0.0, 0.3) : 0.0;
    const double route_dlon = jitter ? rng.normal(0.0, 0.3) : 0.0;
    ingest::Trajectory traj;
    char id[16];
    std::snprintf(id, sizeof(id), "synth%03d", s);
    traj.id = id;
    traj.start_day = start_day;
    traj.points.reserve(length_m);
    for (int t = 0; t < length_m; ++t) {
      const double tf = static_cast<double>(t) / (length_m - 1);
      const double progress = std::clamp((tf - head) / leg, 0.0, 1.0);
      geo::Point p = spec.at(reach * progress);
      p.lat += route_dlat;
      p.lon += route_dlon;
      if (noise_deg > 0.0) {
        p.lat += rng.normal(0.0, noise_deg);
        p.lon += rng.normal(0.0, noise_deg);
      }
      p.lat = std::clamp(p.lat, -90.0, 90.0);
      p.lon = std::clamp(p.lon, -180.0, 180.0);
      traj.points.push_back(p);
    }
    ds.trajectories.push_back(std::move(traj));
  }
  ds.bounding_area = ingest::compute_bounding_box(ds.trajectories);
  return ds;
}

}  // namespace trajgraph::synth
