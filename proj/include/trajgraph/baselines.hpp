#pragma once

#include <cstdint>
#include <vector>

#include "trajgraph/geo.hpp"
#include "trajgraph/ingest.hpp"
#include "trajgraph/rng.hpp"

namespace trajgraph::baselines {

struct LevyParams {
  double step_scale = 0.0;   // Cauchy scale: median absolute daily step, degrees
  double angle_sigma = 0.0;  // circular std of turning angles, radians
  std::vector<geo::Point> start_distribution;
};

LevyParams fit_levy(const ingest::Dataset& dataset);

// Heading evolves by Normal(0, angle_sigma); step length is |Cauchy(0,
// step_scale)| clamped at 10x the scale; coordinates clamped to valid ranges.
std::vector<std::vector<geo::Point>> levy_generate(const LevyParams& params, int m, int count,
                                                   Rng& rng);

// Turning angles of a polyline (radians in (-pi, pi]); exposed for fitting
// diagnostics and tests.
std::vector<double> turning_angles(const std::vector<geo::Point>& points);

}  // namespace trajgraph::baselines
