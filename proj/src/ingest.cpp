#include "trajgraph/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "trajgraph/errors.hpp"
#include "trajgraph/rng.hpp"

namespace trajgraph::ingest {

namespace chr = std::chrono;

int64_t day_number(int year, int month, int day) {
  const chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                                chr::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) {
    throw ParseError("invalid calendar date " + std::to_string(year) + "-" +
                     std::to_string(month) + "-" + std::to_string(day));
  }
  return chr::sys_days{ymd}.time_since_epoch().count();
}

void civil_from_day_number(int64_t days, int& year, int& month, int& day) {
  const chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  year = static_cast<int>(ymd.year());
  month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  day = static_cast<int>(static_cast<unsigned>(ymd.day()));
}

std::string iso_date(int64_t dn) {
  int y, m, d;
  civil_from_day_number(dn, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

namespace {

int parse_int(std::string_view s, const std::string& what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("cannot parse " + what + " from '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

int64_t parse_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
    throw ParseError("expected YYYY-MM-DD, got '" + s + "'");
  }
  return day_number(parse_int(s.substr(0, 4), "year"), parse_int(s.substr(5, 2), "month"),
                    parse_int(s.substr(8, 2), "day"));
}

int64_t parse_timestamp(const std::string& s) {
  if (s.size() < 10) {
    throw ParseError("timestamp too short: '" + s + "'");
  }
  const int64_t days = parse_iso_date(s.substr(0, 10));
  if (s.size() == 10) {
    return days * 86400;
  }
  if (s[10] != ' ' && s[10] != 'T') {
    throw ParseError("expected ' ' or 'T' after date in '" + s + "'");
  }
  std::string_view rest(s.data() + 11, s.size() - 11);
  if (!rest.empty() && rest.back() == 'Z') {
    rest.remove_suffix(1);
  }
  if (const auto dot = rest.find('.'); dot != std::string_view::npos) {
    for (size_t i = dot + 1; i < rest.size(); ++i) {
      if (rest[i] < '0' || rest[i] > '9') {
        throw ParseError("bad fractional seconds in '" + s + "'");
      }
    }
    rest = rest.substr(0, dot);  // sub-second precision is irrelevant at daily sampling
  }
  if (rest.size() != 8 || rest[2] != ':' || rest[5] != ':') {
    throw ParseError("expected HH:MM:SS in '" + s + "'");
  }
  const int hh = parse_int(rest.substr(0, 2), "hour");
  const int mm = parse_int(rest.substr(3, 2), "minute");
  const int ss = parse_int(rest.substr(6, 2), "second");
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60) {
    throw ParseError("time of day out of range in '" + s + "'");
  }
  return days * 86400 + hh * 3600 + mm * 60 + ss;
}

// --- CSV ---

namespace {

struct CsvRecord {
  int line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180 flavor: quoted fields may contain commas, doubled quotes, and
// newlines; records end on LF or CRLF outside quotes.
std::vector<CsvRecord> split_records(std::string_view text) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  current.line = 1;
  std::string field;
  bool in_quotes = false;
  bool any_field_content = false;
  int line = 1;

  auto end_field = [&]() {
    current.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&]() {
    if (any_field_content || !current.fields.empty()) {
      end_field();
      records.push_back(std::move(current));
    }
    current = CsvRecord{};
    current.line = line;
    any_field_content = false;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        any_field_content = true;
        break;
      case ',':
        end_field();
        any_field_content = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        any_field_content = true;
    }
  }
  if (in_quotes) {
    throw ParseError("unterminated quoted field at end of input");
  }
  end_record();  // final record without trailing newline
  return records;
}

double parse_double_field(const std::string& s, const std::string& what) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("cannot parse " + what + " from '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) {
    throw ParseError("cannot parse " + what + " from '" + s + "'");
  }
  return v;
}

}  // namespace

ParseResult parse_csv(std::string_view text, const ColumnMap& columns) {
  if (text.empty()) {
    throw EmptyInputError("empty CSV input");
  }
  const std::vector<CsvRecord> records = split_records(text);
  if (records.empty()) {
    throw EmptyInputError("CSV input has no header row");
  }

  const CsvRecord& header = records.front();
  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.fields.begin(), header.fields.end(), name);
    if (it == header.fields.end()) {
      throw SchemaError("missing CSV column '" + name + "'");
    }
    return static_cast<size_t>(it - header.fields.begin());
  };
  const size_t id_col = column_index(columns.id);
  const size_t time_col = column_index(columns.time);
  const size_t lat_col = column_index(columns.lat);
  const size_t lon_col = column_index(columns.lon);
  const size_t needed = std::max({id_col, time_col, lat_col, lon_col});

  ParseResult result;
  for (size_t r = 1; r < records.size(); ++r) {
    const CsvRecord& rec = records[r];
    try {
      if (rec.fields.size() <= needed) {
        throw ParseError("row has " + std::to_string(rec.fields.size()) + " fields, needs " +
                         std::to_string(needed + 1));
      }
      RawObservation obs;
      obs.subject_id = rec.fields[id_col];
      if (obs.subject_id.empty()) {
        throw ParseError("empty subject id");
      }
      obs.epoch_seconds = parse_timestamp(rec.fields[time_col]);
      obs.lat = parse_double_field(rec.fields[lat_col], "latitude");
      obs.lon = parse_double_field(rec.fields[lon_col], "longitude");
      geo::require_valid(geo::Point{obs.lat, obs.lon});
      result.observations.push_back(std::move(obs));
    } catch (const Error& e) {
      result.errors.push_back({rec.line, e.what()});
    }
  }
  return result;
}

// --- clip window ---

namespace {
constexpr int kReferenceYear = 2001;  // non-leap
}

int ClipWindow::length_days() const {
  const int64_t start = day_number(kReferenceYear, start_month, start_day);
  int64_t end = day_number(kReferenceYear, end_month, end_day);
  if (end < start) {
    end = day_number(kReferenceYear + 1, end_month, end_day);
  }
  return static_cast<int>(end - start) + 1;
}

std::string ClipWindow::start_string() const {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d-%02d", start_month, start_day);
  return buf;
}

std::string ClipWindow::end_string() const {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d-%02d", end_month, end_day);
  return buf;
}

ClipWindow ClipWindow::parse(const std::string& start_md, const std::string& end_md) {
  auto parse_md = [](const std::string& s, int& month, int& day) {
    if (s.size() != 5 || s[2] != '-') {
      throw ParseError("expected MM-DD, got '" + s + "'");
    }
    month = parse_int(s.substr(0, 2), "month");
    day = parse_int(s.substr(3, 2), "day");
    day_number(kReferenceYear, month, day);  // validates; rejects Feb 29 windows
  };
  ClipWindow w;
  parse_md(start_md, w.start_month, w.start_day);
  parse_md(end_md, w.end_month, w.end_day);
  return w;
}

// --- regularize ---

BoundingBox compute_bounding_box(const std::vector<Trajectory>& trajectories) {
  BoundingBox box{90.0, -90.0, 180.0, -180.0};
  for (const auto& t : trajectories) {
    for (const auto& p : t.points) {
      box.min_lat = std::min(box.min_lat, p.lat);
      box.max_lat = std::max(box.max_lat, p.lat);
      box.min_lon = std::min(box.min_lon, p.lon);
      box.max_lon = std::max(box.max_lon, p.lon);
    }
  }
  return box;
}

Dataset regularize(const std::vector<RawObservation>& observations, const ClipWindow& window,
                   int max_gap_days, double min_coverage) {
  if (observations.empty()) {
    throw EmptyInputError("no observations to regularize");
  }
  const int m = window.length_days();

  // Season start for an observation day: the window beginning on the
  // start month-day of this year or the previous one (windows may span
  // New Year) that contains the day. Observations outside any window are
  // dropped.
  auto season_start = [&](int64_t day) -> std::optional<int64_t> {
    int y, mo, d;
    civil_from_day_number(day, y, mo, d);
    for (int year : {y, y - 1}) {
      int64_t start;
      try {
        start = day_number(year, window.start_month, window.start_day);
      } catch (const ParseError&) {
        continue;  // e.g. window starting Feb 29 in a non-leap year
      }
      if (day >= start && day < start + m) {
        return start;
      }
    }
    return std::nullopt;
  };

  std::vector<size_t> order(observations.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const auto& oa = observations[a];
    const auto& ob = observations[b];
    if (oa.subject_id != ob.subject_id) return oa.subject_id < ob.subject_id;
    return oa.epoch_seconds < ob.epoch_seconds;
  });

  // (subject, season start) -> per-day first observation
  std::map<std::pair<std::string, int64_t>, std::vector<std::optional<geo::Point>>> seasons;
  for (size_t idx : order) {
    const RawObservation& obs = observations[idx];
    const int64_t day = obs.epoch_seconds >= 0 ? obs.epoch_seconds / 86400
                                               : (obs.epoch_seconds - 86399) / 86400;
    const auto start = season_start(day);
    if (!start) continue;
    auto& days = seasons[{obs.subject_id, *start}];
    days.resize(m);
    auto& slot = days[static_cast<size_t>(day - *start)];
    if (!slot) {
      slot = geo::Point{obs.lat, obs.lon};  // first observation of the UTC day wins
    }
  }

  Dataset dataset;
  dataset.m = m;
  dataset.clip_window = window;
  for (auto& [key, days] : seasons) {
    int observed = 0;
    for (const auto& p : days) {
      if (p) ++observed;
    }
    if (static_cast<double>(observed) / m < min_coverage) continue;

    // fill gaps: interior gaps interpolate linearly, head/tail gaps extend
    // the nearest observation; any gap longer than max_gap_days drops the
    // trajectory
    std::vector<geo::Point> points(m);
    bool ok = true;
    int prev = -1;
    for (int i = 0; i < m && ok; ++i) {
      if (!days[i]) continue;
      points[i] = *days[i];
      if (prev == -1) {
        if (i > max_gap_days) {
          ok = false;
        } else {
          for (int j = 0; j < i; ++j) points[j] = points[i];
        }
      } else if (i - prev - 1 > 0) {
        const int gap = i - prev - 1;
        if (gap > max_gap_days) {
          ok = false;
        } else {
          for (int j = prev + 1; j < i; ++j) {
            const double f = static_cast<double>(j - prev) / (i - prev);
            points[j] = geo::Point{points[prev].lat + f * (points[i].lat - points[prev].lat),
                                   points[prev].lon + f * (points[i].lon - points[prev].lon)};
          }
        }
      }
      prev = i;
    }
    if (!ok || prev == -1) continue;
    if (m - 1 - prev > max_gap_days) continue;
    for (int j = prev + 1; j < m; ++j) points[j] = points[prev];

    Trajectory traj;
    traj.id = key.first + ":" + iso_date(key.second);
    traj.start_day = key.second;
    traj.points = std::move(points);
    dataset.trajectories.push_back(std::move(traj));
  }

  if (dataset.trajectories.empty()) {
    throw EmptyInputError("no trajectories survived regularization");
  }
  dataset.bounding_area = compute_bounding_box(dataset.trajectories);
  return dataset;
}

std::vector<FoldSplit> kfold(const Dataset& dataset, int folds, uint64_t seed) {
  const int n = static_cast<int>(dataset.trajectories.size());
  if (folds < 2 || n < folds) {
    throw ArgumentError("need at least " + std::to_string(folds) + " trajectories for " +
                        std::to_string(folds) + "-fold split, have " + std::to_string(n));
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[static_cast<int>(rng.uniform_int(i + 1))]);
  }
  std::vector<FoldSplit> splits(folds);
  for (int f = 0; f < folds; ++f) splits[f].fold_index = f;
  for (int i = 0; i < n; ++i) {
    const std::string& id = dataset.trajectories[perm[i]].id;
    for (int f = 0; f < folds; ++f) {
      auto& split = splits[f];
      (i % folds == f ? split.test : split.train).push_back(id);
    }
  }
  return splits;
}

Dataset select(const Dataset& dataset, const std::vector<std::string>& ids) {
  Dataset out;
  out.m = dataset.m;
  out.clip_window = dataset.clip_window;
  for (const auto& id : ids) {
    const auto it = std::find_if(dataset.trajectories.begin(), dataset.trajectories.end(),
                                 [&](const Trajectory& t) { return t.id == id; });
    if (it == dataset.trajectories.end()) {
      throw ArgumentError("unknown trajectory id '" + id + "'");
    }
    out.trajectories.push_back(*it);
  }
  if (out.trajectories.empty()) {
    throw EmptyInputError("empty trajectory selection");
  }
  out.bounding_area = compute_bounding_box(out.trajectories);
  return out;
}

}  // namespace trajgraph::ingest
