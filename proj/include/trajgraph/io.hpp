#pragma once

#include <string>
#include <vector>

#include "trajgraph/hng.hpp"
#include "trajgraph/ingest.hpp"
#include "trajgraph/pipeline.hpp"

namespace trajgraph::io {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Canonical dataset file (schema in README).
std::string dataset_to_json(const ingest::Dataset& dataset);
ingest::Dataset dataset_from_json(const std::string& json_text);

// Region network file: cells with their points, edges, build parameters,
// warnings, and the regionalized training sequences.
std::string network_to_json(const hng::RegionalizeResult& result);
hng::RegionalizeResult network_from_json(const std::string& json_text);

// GeoJSON FeatureCollection of LineStrings (coordinates are [lon, lat]).
std::string trajectories_to_geojson(const ingest::Dataset& dataset);
std::string generated_to_geojson(const std::vector<pipeline::GeneratedTrajectory>& generated);

// GeoJSON FeatureCollection of cell boundary polygons.
std::string cells_to_geojson(const hng::RegionNetwork& network);

// CSV with header id,day_index,lat,lon.
std::string generated_to_csv(const std::vector<pipeline::GeneratedTrajectory>& generated);
std::string points_to_csv(const std::vector<std::vector<geo::Point>>& trajectories,
                          const std::string& id_prefix);

// Reads the id,day_index,lat,lon format back into per-id point lists
// (ids in order of first appearance, points ordered by day index).
std::vector<std::vector<geo::Point>> points_from_csv(std::string_view csv_text);

}  // namespace trajgraph::io
