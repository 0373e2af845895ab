#pragma once

#include <map>
#include <string>
#include <vector>

#include "trajgraph/geo.hpp"
#include "trajgraph/hng.hpp"
#include "trajgraph/rng.hpp"

namespace trajgraph::sampler {

struct Dot {
  geo::CellId cell;
  int64_t count = 0;
};

// Occupancy heatmap: per region, the finer-resolution "dots" its training
// points fall into, with their counts. Only non-empty dots are stored.
struct Heatmap {
  int dot_resolution_offset = 4;
  std::map<geo::CellId, std::vector<Dot>> regions;  // dots sorted by cell id

  int64_t region_total(const geo::CellId& region) const;
};

Heatmap build_heatmap(const hng::RegionNetwork& network, int offset = 4);

// Draw a dot proportionally to its training-point count, then a point
// uniformly inside the dot. The result maps back to the region.
geo::Point sample_point(const geo::CellId& region, const Heatmap& heatmap, Rng& rng);

std::string heatmap_to_json(const Heatmap& heatmap);
Heatmap heatmap_from_json(const std::string& json_text);

}  // namespace trajgraph::sampler
