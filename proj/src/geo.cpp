#include "trajgraph/geo.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>

#include "trajgraph/errors.hpp"

namespace trajgraph::geo {

bool is_valid(const Point& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

void require_valid(const Point& p) {
  if (!is_valid(p)) {
    throw RangeError("invalid point (lat=" + std::to_string(p.lat) +
                     ", lon=" + std::to_string(p.lon) + ")");
  }
}

namespace {

constexpr CellBox kGlobe{-90.0, 90.0, -180.0, 180.0};

// Splits `box` into quadrants and returns the digit for `p` plus the shrunken
// box. Points on the midline go to the upper half, so assignment is total and
// deterministic.
int descend(CellBox& box, const Point& p) {
  const double mid_lat = 0.5 * (box.lat_min + box.lat_max);
  const double mid_lon = 0.5 * (box.lon_min + box.lon_max);
  int digit = 0;
  if (p.lat >= mid_lat) {
    digit |= 2;
    box.lat_min = mid_lat;
  } else {
    box.lat_max = mid_lat;
  }
  if (p.lon >= mid_lon) {
    digit |= 1;
    box.lon_min = mid_lon;
  } else {
    box.lon_max = mid_lon;
  }
  return digit;
}

void apply_digit(CellBox& box, int digit) {
  const double mid_lat = 0.5 * (box.lat_min + box.lat_max);
  const double mid_lon = 0.5 * (box.lon_min + box.lon_max);
  if (digit & 2) {
    box.lat_min = mid_lat;
  } else {
    box.lat_max = mid_lat;
  }
  if (digit & 1) {
    box.lon_min = mid_lon;
  } else {
    box.lon_max = mid_lon;
  }
}

// Parses "Q<res>:<path>"; throws ParseError on any deviation.
std::pair<int, std::string_view> parse_address(const std::string& address) {
  if (address.empty() || address[0] != 'Q') {
    throw ParseError("malformed cell address: " + address);
  }
  const auto colon = address.find(':');
  if (colon == std::string::npos) {
    throw ParseError("malformed cell address (missing ':'): " + address);
  }
  int res = -1;
  const char* first = address.data() + 1;
  const char* last = address.data() + colon;
  auto [ptr, ec] = std::from_chars(first, last, res);
  if (ec != std::errc() || ptr != last || res < 0 || res > kMaxResolution) {
    throw ParseError("malformed cell address (bad resolution): " + address);
  }
  std::string_view path(address.data() + colon + 1, address.size() - colon - 1);
  if (static_cast<int>(path.size()) != res) {
    throw ParseError("malformed cell address (path length != resolution): " + address);
  }
  for (char c : path) {
    if (c < '0' || c > '3') {
      throw ParseError("malformed cell address (bad path digit): " + address);
    }
  }
  return {res, path};
}

}  // namespace

CellId cell_of(const Point& p, int resolution) {
  require_valid(p);
  if (resolution < 0 || resolution > kMaxResolution) {
    throw RangeError("resolution " + std::to_string(resolution) + " outside [0, " +
                     std::to_string(kMaxResolution) + "]");
  }
  CellBox box = kGlobe;
  std::string address = "Q" + std::to_string(resolution) + ":";
  address.reserve(address.size() + resolution);
  for (int level = 0; level < resolution; ++level) {
    address.push_back(static_cast<char>('0' + descend(box, p)));
  }
  return CellId{resolution, std::move(address)};
}

CellBox cell_box(const CellId& c) {
  auto [res, path] = parse_address(c.address);
  CellBox box = kGlobe;
  for (char digit : path) {
    apply_digit(box, digit - '0');
  }
  return box;
}

CellBoundary cell_boundary(const CellId& c) {
  const CellBox b = cell_box(c);
  return CellBoundary{{{b.lat_min, b.lon_min},
                       {b.lat_min, b.lon_max},
                       {b.lat_max, b.lon_max},
                       {b.lat_max, b.lon_min}}};
}

bool CellBoundary::contains(const Point& p) const {
  // Boundaries produced by this index are axis-aligned boxes; the closed box
  // test is exact and avoids edge-case ambiguity of general ray casting.
  double lat_min = vertices.front().lat, lat_max = lat_min;
  double lon_min = vertices.front().lon, lon_max = lon_min;
  for (const Point& v : vertices) {
    lat_min = std::min(lat_min, v.lat);
    lat_max = std::max(lat_max, v.lat);
    lon_min = std::min(lon_min, v.lon);
    lon_max = std::max(lon_max, v.lon);
  }
  return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
}

Point boundary_centroid(const CellBoundary& b) {
  double lat = 0.0, lon = 0.0;
  for (const Point& v : b.vertices) {
    lat += v.lat;
    lon += v.lon;
  }
  const double n = static_cast<double>(b.vertices.size());
  return Point{lat / n, lon / n};
}

double boundary_diameter(const CellBoundary& b) {
  double best = 0.0;
  for (size_t i = 0; i < b.vertices.size(); ++i) {
    for (size_t j = i + 1; j < b.vertices.size(); ++j) {
      best = std::max(best, euclidean_deg(b.vertices[i], b.vertices[j]));
    }
  }
  return best;
}

double euclidean_deg(const Point& a, const Point& b) {
  const double dlat = a.lat - b.lat;
  const double dlon = a.lon - b.lon;
  return std::sqrt(dlat * dlat + dlon * dlon);
}

Point sample_point_in_cell(const CellId& c, Rng& rng) {
  const CellBox b = cell_box(c);
  // uniform() is in [0, 1), so samples stay on the cell's own side of every
  // shared edge and the round trip through cell_of is exact
  return Point{b.lat_min + rng.uniform() * (b.lat_max - b.lat_min),
               b.lon_min + rng.uniform() * (b.lon_max - b.lon_min)};
}

}  // namespace trajgraph::geo
