#pragma once

// Hourly building dataset: ingestion, validation, calendar helpers and the
// split into whole days.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "bems/csv.hpp"
#include "bems/errors.hpp"
#include "bems/plant.hpp"
#include "bems/simulator.hpp"

namespace bems {

// Hours since 1970-01-01T00:00Z.
using HourStamp = std::int64_t;

inline HourStamp hour_stamp(int year, unsigned month, unsigned day, int hour) {
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) throw DataError("invalid calendar date");
  return std::chrono::sys_days{ymd}.time_since_epoch().count() * 24LL + hour;
}

inline std::chrono::year_month_day civil_date(HourStamp t) {
  const auto days = static_cast<int>(t >= 0 ? t / 24 : (t - 23) / 24);
  return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days}}};
}

inline int hour_of(HourStamp t) { return static_cast<int>(((t % 24) + 24) % 24); }

inline int day_of_year(HourStamp t) {
  const auto ymd = civil_date(t);
  const auto jan1 = std::chrono::sys_days{ymd.year() / std::chrono::January / 1};
  return static_cast<int>((std::chrono::sys_days{ymd} - jan1).count()) + 1;
}

inline std::string format_date(HourStamp t) {
  const auto ymd = civil_date(t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_timestamp(HourStamp t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:00:00Z", format_date(t).c_str(), hour_of(t));
  return buf;
}

// Accepts YYYY-MM-DD (midnight), YYYY-MM-DDTHH:MM[:SS][Z|+00:00]; minutes and
// seconds must be zero.
inline HourStamp parse_timestamp(const std::string& s) {
  int y = 0, hh = 0, mm = 0, ss = 0;
  unsigned mo = 0, d = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2u-%2u%n", &y, &mo, &d, &consumed) != 3 || consumed != 10)
    throw DataError("bad timestamp '" + s + "'");
  std::string rest = s.substr(10);
  if (!rest.empty()) {
    if (rest[0] != 'T' && rest[0] != ' ') throw DataError("bad timestamp '" + s + "'");
    int n = 0;
    if (std::sscanf(rest.c_str() + 1, "%2d:%2d%n", &hh, &mm, &n) != 2) throw DataError("bad timestamp '" + s + "'");
    rest = rest.substr(1 + static_cast<std::size_t>(n));
    if (!rest.empty() && rest[0] == ':') {
      if (std::sscanf(rest.c_str() + 1, "%2d%n", &ss, &n) != 1) throw DataError("bad timestamp '" + s + "'");
      rest = rest.substr(1 + static_cast<std::size_t>(n));
    }
    if (!(rest.empty() || rest == "Z" || rest == "+00:00")) throw DataError("timestamp '" + s + "' is not UTC");
  }
  if (hh < 0 || hh > 23 || mm != 0 || ss != 0) throw DataError("timestamp '" + s + "' is not on the hour");
  return hour_stamp(y, mo, d, hh);
}

struct HourRow {
  HourStamp t = 0;
  double demand_kw = 0.0;
  double pv_kw = 0.0;
  double tou_imp = 0.0;  // EUR/kWh
  double tou_exp = 0.0;  // EUR/kWh
};

inline const std::vector<std::string> kDatasetHeader{"timestamp", "demand_kw", "pv_kw", "tou_imp_eur_kwh",
                                                     "tou_exp_eur_kwh"};

struct Dataset {
  std::vector<HourRow> rows;  // strictly increasing by one hour
};

inline std::vector<HourRow> parse_dataset_rows(std::istream& in, const std::string& source) {
  try {
    csv::expect_header(in, kDatasetHeader);
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
  std::vector<HourRow> rows;
  std::string line;
  long row = 1;
  while (csv::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != kDatasetHeader.size())
      throw DataError(source + ": row " + std::to_string(row) + ": expected 5 fields");
    HourRow r;
    try {
      r.t = parse_timestamp(f[0]);
      r.demand_kw = csv::parse_double(f[1], "demand_kw", row);
      r.pv_kw = csv::parse_double(f[2], "pv_kw", row);
      r.tou_imp = csv::parse_double(f[3], "tou_imp_eur_kwh", row);
      r.tou_exp = csv::parse_double(f[4], "tou_exp_eur_kwh", row);
    } catch (const DataError& e) {
      throw DataError(source + ": row " + std::to_string(row) + ": " + e.what());
    }
    for (const double v : {r.demand_kw, r.pv_kw, r.tou_imp, r.tou_exp})
      if (!std::isfinite(v) || v < 0.0)
        throw DataError(source + ": row " + std::to_string(row) + ": values must be finite and >= 0");
    rows.push_back(r);
  }
  return rows;
}

// Sorts, then rejects duplicated or missing hours.
inline Dataset validate_rows(std::vector<HourRow> rows) {
  if (rows.empty()) throw DataError("dataset is empty");
  std::stable_sort(rows.begin(), rows.end(), [](const HourRow& a, const HourRow& b) { return a.t < b.t; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].t == rows[i - 1].t) throw DataError("duplicate timestamp " + format_timestamp(rows[i].t));
    if (rows[i].t != rows[i - 1].t + 1) throw DataError("gap in data after " + format_timestamp(rows[i - 1].t));
  }
  return Dataset{std::move(rows)};
}

inline Dataset ingest(std::span<const std::filesystem::path> paths) {
  if (paths.empty()) throw DataError("no dataset files given");
  std::vector<HourRow> all;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot open " + p.string());
    auto rows = parse_dataset_rows(in, p.string());
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return validate_rows(std::move(all));
}

inline void write_dataset(std::ostream& os, const Dataset& d) {
  csv::write_row(os, kDatasetHeader);
  for (const auto& r : d.rows)
    csv::write_row(os, {format_timestamp(r.t), csv::format(r.demand_kw), csv::format(r.pv_kw), csv::format(r.tou_imp),
                        csv::format(r.tou_exp)});
}

struct DayRecord {
  HourStamp start = 0;  // midnight
  std::string date;
  int day_of_year = 1;
  DayActuals actual;
};

// Whole days only; partial leading or trailing days are dropped.
inline std::vector<DayRecord> split_days(const Dataset& d) {
  std::vector<DayRecord> days;
  std::size_t i = 0;
  while (i < d.rows.size() && hour_of(d.rows[i].t) != 0) ++i;
  for (; i + kHoursPerDay <= d.rows.size(); i += kHoursPerDay) {
    DayRecord day;
    day.start = d.rows[i].t;
    day.date = format_date(day.start);
    day.day_of_year = day_of_year(day.start);
    for (int h = 0; h < kHoursPerDay; ++h) {
      const auto& r = d.rows[i + static_cast<std::size_t>(h)];
      day.actual.pv[h] = r.pv_kw;
      day.actual.load[h] = r.demand_kw;
      day.actual.tariffs.tou_imp[h] = r.tou_imp;
      day.actual.tariffs.tou_exp[h] = r.tou_exp;
    }
    days.push_back(std::move(day));
  }
  return days;
}

}  // namespace bems
