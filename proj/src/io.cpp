#include "trajgraph/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "trajgraph/errors.hpp"

namespace trajgraph::io {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << content;
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

std::string dataset_to_json(const ingest::Dataset& dataset) {
  json j;
  j["m"] = dataset.m;
  j["clip_window"] = {{"start", dataset.clip_window.start_string()},
                      {"end", dataset.clip_window.end_string()}};
  j["bounding_area"] = {{"min_lat", dataset.bounding_area.min_lat},
                        {"max_lat", dataset.bounding_area.max_lat},
                        {"min_lon", dataset.bounding_area.min_lon},
                        {"max_lon", dataset.bounding_area.max_lon}};
  json trajs = json::array();
  for (const auto& t : dataset.trajectories) {
    json points = json::array();
    for (const auto& p : t.points) {
      points.push_back({p.lat, p.lon});
    }
    trajs.push_back({{"id", t.id},
                     {"start_date", ingest::iso_date(t.start_day)},
                     {"points", std::move(points)}});
  }
  j["trajectories"] = std::move(trajs);
  return j.dump(2);
}

ingest::Dataset dataset_from_json(const std::string& json_text) {
  ingest::Dataset dataset;
  try {
    const json j = json::parse(json_text);
    dataset.m = j.at("m").get<int>();
    dataset.clip_window = ingest::ClipWindow::parse(
        j.at("clip_window").at("start").get<std::string>(),
        j.at("clip_window").at("end").get<std::string>());
    for (const auto& t : j.at("trajectories")) {
      ingest::Trajectory traj;
      traj.id = t.at("id").get<std::string>();
      traj.start_day = ingest::parse_iso_date(t.at("start_date").get<std::string>());
      for (const auto& p : t.at("points")) {
        traj.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      if (static_cast<int>(traj.points.size()) != dataset.m) {
        throw ParseError("trajectory " + traj.id + " has " + std::to_string(traj.points.size()) +
                         " points, dataset m is " + std::to_string(dataset.m));
      }
      dataset.trajectories.push_back(std::move(traj));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad dataset JSON: ") + e.what());
  }
  if (dataset.trajectories.empty()) {
    throw EmptyInputError("dataset file contains no trajectories");
  }
  dataset.bounding_area = ingest::compute_bounding_box(dataset.trajectories);
  return dataset;
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

std::string network_to_json(const hng::RegionalizeResult& result) {
  const hng::RegionNetwork& net = result.network;
  json j;
  j["params"] = {{"r", net.split_threshold_r},
                 {"initial_zoom", net.initial_zoom},
                 {"max_zoom", net.max_zoom}};
  json cells = json::array();
  for (const auto& cell : net.cells) {
    const auto& points = net.points_by_cell.at(cell);
    json pts = json::array();
    for (const auto& p : points) {
      pts.push_back({p.lat, p.lon});
    }
    cells.push_back({{"address", cell.address},
                     {"resolution", cell.resolution},
                     {"point_count", points.size()},
                     {"points", std::move(pts)}});
  }
  j["cells"] = std::move(cells);
  json edges = json::array();
  for (const auto& [from, to] : net.edges) {
    edges.push_back({from.address, to.address});
  }
  j["edges"] = std::move(edges);
  j["split_addresses"] = net.split_addresses;
  j["warnings"] = net.warnings;
  json seqs = json::array();
  for (const auto& seq : result.sequences) {
    json cells_of_seq = json::array();
    for (const auto& c : seq.cells) cells_of_seq.push_back(c.address);
    seqs.push_back({{"trajectory_id", seq.trajectory_id}, {"cells", std::move(cells_of_seq)}});
  }
  j["sequences"] = std::move(seqs);
  return j.dump(2);
}

hng::RegionalizeResult network_from_json(const std::string& json_text) {
  hng::RegionalizeResult result;
  hng::RegionNetwork& net = result.network;
  try {
    const json j = json::parse(json_text);
    net.split_threshold_r = j.at("params").at("r").get<double>();
    net.initial_zoom = j.at("params").at("initial_zoom").get<int>();
    net.max_zoom = j.at("params").at("max_zoom").get<int>();
    for (const auto& c : j.at("cells")) {
      const geo::CellId cell = cell_from_address(c.at("address").get<std::string>());
      std::vector<geo::Point> points;
      for (const auto& p : c.at("points")) {
        points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      net.cells.push_back(cell);
      net.points_by_cell.emplace(cell, std::move(points));
    }
    for (const auto& e : j.at("edges")) {
      net.edges.emplace(cell_from_address(e.at(0).get<std::string>()),
                        cell_from_address(e.at(1).get<std::string>()));
    }
    for (const auto& s : j.at("split_addresses")) {
      net.split_addresses.insert(s.get<std::string>());
    }
    for (const auto& w : j.at("warnings")) {
      net.warnings.push_back(w.get<std::string>());
    }
    for (const auto& s : j.at("sequences")) {
      hng::RegionSequence seq;
      seq.trajectory_id = s.at("trajectory_id").get<std::string>();
      for (const auto& c : s.at("cells")) {
        seq.cells.push_back(cell_from_address(c.get<std::string>()));
      }
      result.sequences.push_back(std::move(seq));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad network JSON: ") + e.what());
  }
  return result;
}

namespace {

json linestring_feature(const std::string& id, const std::vector<geo::Point>& points,
                        json extra_properties = json::object()) {
  json coords = json::array();
  for (const auto& p : points) {
    coords.push_back({p.lon, p.lat});  // GeoJSON order
  }
  extra_properties["id"] = id;
  return json{{"type", "Feature"},
              {"properties", std::move(extra_properties)},
              {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}}};
}

}  // namespace

std::string trajectories_to_geojson(const ingest::Dataset& dataset) {
  json features = json::array();
  for (const auto& t : dataset.trajectories) {
    features.push_back(linestring_feature(t.id, t.points,
                                          {{"start_date", ingest::iso_date(t.start_day)}}));
  }
  return json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump(2);
}

std::string generated_to_geojson(const std::vector<pipeline::GeneratedTrajectory>& generated) {
  json features = json::array();
  for (size_t i = 0; i < generated.size(); ++i) {
    const auto& g = generated[i];
    features.push_back(linestring_feature(
        "gen" + std::to_string(i), g.points,
        {{"seed", g.seed_used}, {"truncated", g.truncated}}));
  }
  return json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump(2);
}

std::string cells_to_geojson(const hng::RegionNetwork& network) {
  json features = json::array();
  for (const auto& cell : network.cells) {
    const geo::CellBoundary boundary = geo::cell_boundary(cell);
    json ring = json::array();
    for (const auto& v : boundary.vertices) {
      ring.push_back({v.lon, v.lat});
    }
    ring.push_back({boundary.vertices.front().lon, boundary.vertices.front().lat});
    features.push_back(
        json{{"type", "Feature"},
             {"properties",
              {{"address", cell.address},
               {"resolution", cell.resolution},
               {"point_count", network.points_by_cell.at(cell).size()}}},
             {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({std::move(ring)})}}}});
  }
  return json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump(2);
}

std::string generated_to_csv(const std::vector<pipeline::GeneratedTrajectory>& generated) {
  std::ostringstream out;
  out << "id,day_index,lat,lon\n";
  char buf[96];
  for (size_t i = 0; i < generated.size(); ++i) {
    for (size_t d = 0; d < generated[i].points.size(); ++d) {
      const auto& p = generated[i].points[d];
      std::snprintf(buf, sizeof(buf), "gen%zu,%zu,%.9f,%.9f\n", i, d, p.lat, p.lon);
      out << buf;
    }
  }
  return out.str();
}

std::string points_to_csv(const std::vector<std::vector<geo::Point>>& trajectories,
                          const std::string& id_prefix) {
  std::ostringstream out;
  out << "id,day_index,lat,lon\n";
  char buf[96];
  for (size_t i = 0; i < trajectories.size(); ++i) {
    for (size_t d = 0; d < trajectories[i].size(); ++d) {
      const auto& p = trajectories[i][d];
      std::snprintf(buf, sizeof(buf), "%s%zu,%zu,%.9f,%.9f\n", id_prefix.c_str(), i, d, p.lat,
                    p.lon);
      out << buf;
    }
  }
  return out.str();
}

std::vector<std::vector<geo::Point>> points_from_csv(std::string_view csv_text) {
  std::istringstream in{std::string(csv_text)};
  std::string line;
  if (!std::getline(in, line)) {
    throw EmptyInputError("empty trajectory CSV");
  }
  std::vector<std::vector<geo::Point>> out;
  std::map<std::string, size_t> index;
  std::vector<std::vector<std::pair<int, geo::Point>>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id, day, lat, lon;
    if (!std::getline(fields, id, ',') || !std::getline(fields, day, ',') ||
        !std::getline(fields, lat, ',') || !std::getline(fields, lon, ',')) {
      throw ParseError("bad trajectory CSV row: " + line);
    }
    const auto [it, inserted] = index.emplace(id, rows.size());
    if (inserted) rows.emplace_back();
    rows[it->second].push_back({std::stoi(day), geo::Point{std::stod(lat), std::stod(lon)}});
  }
  if (rows.empty()) {
    throw EmptyInputError("trajectory CSV has no data rows");
  }
  out.reserve(rows.size());
  for (auto& r : rows) {
    std::sort(r.begin(), r.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<geo::Point> points;
    points.reserve(r.size());
    for (const auto& [day, p] : r) points.push_back(p);
    out.push_back(std::move(points));
  }
  return out;
}

}  // namespace trajgraph::io
