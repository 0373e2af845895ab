#include "trajgraph/sampler.hpp"

#include <algorithm>

#include "json.hpp"
#include "trajgraph/errors.hpp"

namespace trajgraph::sampler {

using nlohmann::json;

int64_t Heatmap::region_total(const geo::CellId& region) const {
  const auto it = regions.find(region);
  if (it == regions.end()) return 0;
  int64_t total = 0;
  for (const Dot& d : it->second) total += d.count;
  return total;
}

Heatmap build_heatmap(const hng::RegionNetwork& network, int offset) {
  if (offset < 1) {
    throw ArgumentError("dot resolution offset must be >= 1");
  }
  Heatmap heatmap;
  heatmap.dot_resolution_offset = offset;
  for (const auto& [region, points] : network.points_by_cell) {
    const int dot_res = std::min(region.resolution + offset, geo::kMaxResolution);
    std::map<geo::CellId, int64_t> counts;
    for (const auto& p : points) {
      ++counts[geo::cell_of(p, dot_res)];
    }
    std::vector<Dot>& dots = heatmap.regions[region];
    dots.reserve(counts.size());
    for (const auto& [cell, count] : counts) {
      dots.push_back({cell, count});
    }
  }
  return heatmap;
}

geo::Point sample_point(const geo::CellId& region, const Heatmap& heatmap, Rng& rng) {
  const auto it = heatmap.regions.find(region);
  if (it == heatmap.regions.end() || it->second.empty()) {
    throw UnknownRegionError("region " + region.address + " is not in the heatmap");
  }
  const std::vector<Dot>& dots = it->second;
  int64_t total = 0;
  for (const Dot& d : dots) total += d.count;
  double u = rng.uniform() * static_cast<double>(total);
  const Dot* chosen = &dots.back();
  for (const Dot& d : dots) {
    u -= static_cast<double>(d.count);
    if (u <= 0.0) {
      chosen = &d;
      break;
    }
  }
  return geo::sample_point_in_cell(chosen->cell, rng);
}

std::string heatmap_to_json(const Heatmap& heatmap) {
  json j;
  j["dot_resolution_offset"] = heatmap.dot_resolution_offset;
  json regions = json::object();
  for (const auto& [region, dots] : heatmap.regions) {
    json list = json::array();
    for (const Dot& d : dots) {
      list.push_back({{"dot", d.cell.address}, {"count", d.count}});
    }
    regions[region.address] = std::move(list);
  }
  j["regions"] = std::move(regions);
  return j.dump();
}

namespace {

geo::CellId cell_from_address(const std::string& address) {
  geo::CellId cell{0, address};
  const auto colon = address.find(':');
  if (address.empty() || address[0] != 'Q' || colon == std::string::npos) {
    throw ParseError("bad cell address '" + address + "'");
  }
  cell.resolution = std::stoi(address.substr(1, colon - 1));
  return cell;
}

}  // namespace

Heatmap heatmap_from_json(const std::string& json_text) {
  Heatmap heatmap;
  try {
    const json j = json::parse(json_text);
    heatmap.dot_resolution_offset = j.at("dot_resolution_offset").get<int>();
    for (const auto& [address, list] : j.at("regions").items()) {
      auto& dots = heatmap.regions[cell_from_address(address)];
      for (const auto& entry : list) {
        dots.push_back(
            {cell_from_address(entry.at("dot").get<std::string>()), entry.at("count").get<int64_t>()});
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad heatmap JSON: ") + e.what());
  }
  return heatmap;
}

}  // namespace trajgraph::sampler
