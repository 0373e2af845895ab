#pragma once

#include <cstdint>
#include <vector>

#include "trajgraph/geo.hpp"
#include "trajgraph/ingest.hpp"

namespace trajgraph::synth {

// A migration-like corridor given as a waypoint polyline.
struct CorridorSpec {
  std::vector<geo::Point> waypoints;

  static CorridorSpec default_spec();

  double arc_length() const;
  double displacement() const;  // straight-line distance between endpoints
  geo::Point at(double u) const;  // u in [0, 1], arc-length parameterized
};

// Desk-scale stand-in for a tracking dataset: n subjects walk the corridor
// over m days with per-subject speed jitter and Gaussian positional noise.
// noise == 0 collapses both, so every trajectory equals the corridor samples.
ingest::Dataset corridor_dataset(int subjects, int length_m, double noise_deg, uint64_t seed,
                                 const CorridorSpec& spec = CorridorSpec::default_spec());

}  // namespace trajgraph::synth
