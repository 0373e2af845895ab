#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajgraph/geo.hpp"

namespace trajgraph::ingest {

// --- date utilities (UTC, proleptic Gregorian) ---

// days since 1970-01-01
int64_t day_number(int year, int month, int day);
void civil_from_day_number(int64_t days, int& year, int& month, int& day);
std::string iso_date(int64_t day_number);
int64_t parse_iso_date(const std::string& s);

// Accepts "YYYY-MM-DD[ T]HH:MM:SS[.frac][Z]" and bare dates; returns UTC
// epoch seconds.
int64_t parse_timestamp(const std::string& s);

struct RawObservation {
  std::string subject_id;
  int64_t epoch_seconds = 0;
  double lat = 0.0;
  double lon = 0.0;
};

struct RowError {
  int line = 0;
  std::string message;
};

struct ColumnMap {
  std::string id = "individual-local-identifier";
  std::string time = "timestamp";
  std::string lat = "location-lat";
  std::string lon = "location-long";
};

struct ParseResult {
  std::vector<RawObservation> observations;
  std::vector<RowError> errors;  // rejected rows, reported rather than dropped silently
};

ParseResult parse_csv(std::string_view text, const ColumnMap& columns = {});

// Seasonal clipping window given as month-day endpoints, inclusive. The
// window length (m) is computed in a non-leap reference year so every season
// of a dataset has the same number of days.
struct ClipWindow {
  int start_month = 3, start_day = 1;
  int end_month = 9, end_day = 1;

  int length_days() const;                 // m
  std::string start_string() const;        // "03-01"
  std::string end_string() const;
  static ClipWindow parse(const std::string& start_md, const std::string& end_md);
};

struct Trajectory {
  std::string id;
  int64_t start_day = 0;           // day number of the first point
  std::vector<geo::Point> points;  // one per day, length m
};

struct BoundingBox {
  double min_lat = 0, max_lat = 0, min_lon = 0, max_lon = 0;
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  int m = 0;
  ClipWindow clip_window;
  BoundingBox bounding_area;
};

BoundingBox compute_bounding_box(const std::vector<Trajectory>& trajectories);

// One observation per subject per UTC day (first of the day), clipped to the
// seasonal window, multi-year subjects split per season, sparse subjects
// dropped, and remaining gaps of <= max_gap_days filled by interpolation.
Dataset regularize(const std::vector<RawObservation>& observations, const ClipWindow& window,
                   int max_gap_days = 7, double min_coverage = 0.8);

struct FoldSplit {
  int fold_index = 0;
  std::vector<std::string> train;
  std::vector<std::string> test;
};

std::vector<FoldSplit> kfold(const Dataset& dataset, int folds, uint64_t seed);

// Materializes the train/test trajectories of one split.
Dataset select(const Dataset& dataset, const std::vector<std::string>& ids);

}  // namespace trajgraph::ingest
