#pragma once

#include <string>
#include <vector>

#include "trajgraph/rng.hpp"

namespace trajgraph::geo {

struct Point {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  bool operator==(const Point& o) const { return lat == o.lat && lon == o.lon; }
};

bool is_valid(const Point& p);
void require_valid(const Point& p);

// A cell of the hierarchical index. The address embeds the resolution, so
// addresses at different resolutions never collide. This library uses a
// deterministic latitude/longitude quadtree; addresses look like
// "Q<resolution>:<path>" where <path> is one base-4 digit per level
// (bit 1 = upper latitude half, bit 0 = upper longitude half).
struct CellId {
  int resolution = 0;
  std::string address;

  bool operator==(const CellId& o) const { return address == o.address; }
  bool operator!=(const CellId& o) const { return address != o.address; }
  bool operator<(const CellId& o) const {
    if (resolution != o.resolution) return resolution < o.resolution;
    return address < o.address;
  }
};

// Closed lat/lon box of a cell.
struct CellBox {
  double lat_min, lat_max, lon_min, lon_max;
};

struct CellBoundary {
  std::vector<Point> vertices;  // simple closed polygon, >= 3 vertices

  bool contains(const Point& p) const;
};

inline constexpr int kMaxResolution = 28;

// Deterministic point -> cell assignment; every valid point is covered at
// every resolution in [0, kMaxResolution].
CellId cell_of(const Point& p, int resolution);

CellBox cell_box(const CellId& c);
CellBoundary cell_boundary(const CellId& c);

Point boundary_centroid(const CellBoundary& b);
double boundary_diameter(const CellBoundary& b);

double euclidean_deg(const Point& a, const Point& b);

// Uniform (in degree space) sample inside the cell; the result maps back to
// the cell via cell_of at the cell's resolution.
Point sample_point_in_cell(const CellId& c, Rng& rng);

}  // namespace trajgraph::geo
