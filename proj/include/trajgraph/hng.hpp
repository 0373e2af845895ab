#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "trajgraph/geo.hpp"
#include "trajgraph/ingest.hpp"

namespace trajgraph::hng {

// The learned region network: a partition of the training points into cells
// of mixed resolutions, plus the directed transition edges observed in the
// training trajectories.
struct RegionNetwork {
  std::vector<geo::CellId> cells;  // canonical order: (resolution, address)
  std::set<std::pair<geo::CellId, geo::CellId>> edges;
  std::map<geo::CellId, std::vector<geo::Point>> points_by_cell;
  int initial_zoom = 2;
  int max_zoom = 9;
  double split_threshold_r = 1.0;
  std::set<std::string> split_addresses;  // interior cells, needed to map points down
  std::vector<std::string> warnings;      // cells stuck at max_zoom above the bound

  // Final cell that contains the point, walking down from initial_zoom
  // through split cells. Throws UnknownRegionError for points outside every
  // network cell.
  geo::CellId locate(const geo::Point& p) const;
};

struct RegionSequence {
  std::string trajectory_id;
  std::vector<geo::CellId> cells;
};

// Maximum pairwise distance of a point set.
double diameter(const std::vector<geo::Point>& points);

struct RegionalizeResult {
  RegionNetwork network;
  std::vector<RegionSequence> sequences;
};

// Recursively refines cells whose point diameter exceeds r, then maps each
// trajectory to its sequence of final cells and extracts transition edges.
RegionalizeResult regionalize(const ingest::Dataset& dataset, double r, int initial_zoom = 2,
                              int max_zoom = 9);

// Deduplicated consecutive-pair edges (self-loops kept).
std::set<std::pair<geo::CellId, geo::CellId>> build_graph(
    const std::vector<RegionSequence>& sequences);

}  // namespace trajgraph::hng
