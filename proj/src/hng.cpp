#include "trajgraph/hng.hpp"

#include <algorithm>
#include <deque>

#include "trajgraph/errors.hpp"

namespace trajgraph::hng {

double diameter(const std::vector<geo::Point>& points) {
  if (points.empty()) {
    throw ArgumentError("diameter of an empty point set");
  }
  double best = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t j = i + 1; j < points.size(); ++j) {
      best = std::max(best, geo::euclidean_deg(points[i], points[j]));
    }
  }
  return best;
}

geo::CellId RegionNetwork::locate(const geo::Point& p) const {
  for (int res = initial_zoom; res <= max_zoom; ++res) {
    geo::CellId c = geo::cell_of(p, res);
    if (split_addresses.count(c.address)) continue;
    if (points_by_cell.count(c)) return c;
    break;
  }
  throw UnknownRegionError("point (" + std::to_string(p.lat) + ", " + std::to_string(p.lon) +
                           ") is outside the region network");
}

RegionalizeResult regionalize(const ingest::Dataset& dataset, double r, int initial_zoom,
                              int max_zoom) {
  if (dataset.trajectories.empty()) {
    throw EmptyInputError("cannot regionalize an empty dataset");
  }
  if (r <= 0.0) {
    throw ArgumentError("split threshold r must be positive");
  }
  if (initial_zoom < 0 || max_zoom > geo::kMaxResolution || initial_zoom >= max_zoom) {
    throw ArgumentError("need 0 <= initial_zoom < max_zoom <= " +
                        std::to_string(geo::kMaxResolution));
  }

  RegionNetwork net;
  net.initial_zoom = initial_zoom;
  net.max_zoom = max_zoom;
  net.split_threshold_r = r;

  std::vector<geo::Point> all_points;
  for (const auto& t : dataset.trajectories) {
    all_points.insert(all_points.end(), t.points.begin(), t.points.end());
  }

  // Seed cells at the initial zoom, then refine each over-diameter cell at
  // its own next resolution. Only the split cell's points are reassigned, so
  // sibling cells without training points never enter the network.
  std::map<geo::CellId, std::vector<geo::Point>> pending;
  for (const auto& p : all_points) {
    pending[geo::cell_of(p, initial_zoom)].push_back(p);
  }
  std::deque<geo::CellId> queue;
  for (const auto& [cell, pts] : pending) queue.push_back(cell);

  while (!queue.empty()) {
    const geo::CellId cell = queue.front();
    queue.pop_front();
    auto node = pending.extract(cell);
    std::vector<geo::Point>& pts = node.mapped();
    const double d = diameter(pts);
    if (d > r && cell.resolution < max_zoom) {
      net.split_addresses.insert(cell.address);
      std::map<geo::CellId, std::vector<geo::Point>> children;
      for (const auto& p : pts) {
        children[geo::cell_of(p, cell.resolution + 1)].push_back(p);
      }
      for (auto& [child, child_pts] : children) {
        queue.push_back(child);
        pending.emplace(child, std::move(child_pts));
      }
    } else {
      if (d > r) {
        net.warnings.push_back("cell " + cell.address + " at max_zoom has diameter " +
                               std::to_string(d) + " > r=" + std::to_string(r));
      }
      net.points_by_cell.emplace(cell, std::move(pts));
    }
  }
  std::sort(net.warnings.begin(), net.warnings.end());
  for (const auto& [cell, pts] : net.points_by_cell) {
    net.cells.push_back(cell);
  }

  RegionalizeResult result;
  result.sequences.reserve(dataset.trajectories.size());
  for (const auto& t : dataset.trajectories) {
    RegionSequence seq;
    seq.trajectory_id = t.id;
    seq.cells.reserve(t.points.size());
    for (const auto& p : t.points) {
      seq.cells.push_back(net.locate(p));
    }
    result.sequences.push_back(std::move(seq));
  }
  net.edges = build_graph(result.sequences);
  result.network = std::move(net);
  return result;
}

std::set<std::pair<geo::CellId, geo::CellId>> build_graph(
    const std::vector<RegionSequence>& sequences) {
  std::set<std::pair<geo::CellId, geo::CellId>> edges;
  for (const auto& seq : sequences) {
    for (size_t i = 0; i + 1 < seq.cells.size(); ++i) {
      edges.emplace(seq.cells[i], seq.cells[i + 1]);
    }
  }
  return edges;
}

}  // namespace trajgraph::hng
