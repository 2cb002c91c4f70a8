#pragma once

// CSV writers and readers for every artifact the command line emits:
// probability matrices, scenario sets, day schedules, hourly logs, metrics.

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "bems/csv.hpp"
#include "bems/dataset.hpp"
#include "bems/dispatch_opt.hpp"
#include "bems/prob_model.hpp"
#include "bems/scenario_gen.hpp"
#include "bems/simulator.hpp"

namespace bems {

// Header bin,0..23; rows lo_kw and hi_kw carry each hour's range, then one row per bin.
inline void write_matrix_csv(std::ostream& os, const ProbabilityMatrix& m) {
  std::vector<std::string> row{"bin"};
  for (int h = 0; h < kHoursPerDay; ++h) row.push_back(std::to_string(h));
  csv::write_row(os, row);
  row = {"lo_kw"};
  for (int h = 0; h < kHoursPerDay; ++h) row.push_back(csv::format(m.range(h).lo));
  csv::write_row(os, row);
  row = {"hi_kw"};
  for (int h = 0; h < kHoursPerDay; ++h) row.push_back(csv::format(m.range(h).hi));
  csv::write_row(os, row);
  for (int k = 0; k < m.bins(); ++k) {
    row = {std::to_string(k)};
    for (int h = 0; h < kHoursPerDay; ++h) row.push_back(csv::format(m.at(k, h)));
    csv::write_row(os, row);
  }
}

inline ProbabilityMatrix read_matrix_csv(std::istream& in, MatrixKind kind, Quantity quantity) {
  std::vector<std::string> header{"bin"};
  for (int h = 0; h < kHoursPerDay; ++h) header.push_back(std::to_string(h));
  csv::expect_header(in, header);
  std::string line;
  HourlyArray<BinRange> ranges{};
  std::vector<std::vector<double>> values;
  long row = 1;
  while (csv::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != header.size()) throw DataError("row " + std::to_string(row) + ": expected 25 fields");
    std::vector<double> v;
    for (int h = 0; h < kHoursPerDay; ++h) v.push_back(csv::parse_double(f[h + 1], "probability", row));
    if (f[0] == "lo_kw") {
      for (int h = 0; h < kHoursPerDay; ++h) ranges[h].lo = v[h];
    } else if (f[0] == "hi_kw") {
      for (int h = 0; h < kHoursPerDay; ++h) ranges[h].hi = v[h];
    } else {
      if (csv::parse_long(f[0], "bin", row) != static_cast<long>(values.size()))
        throw DataError("row " + std::to_string(row) + ": bins out of order");
      values.push_back(std::move(v));
    }
  }
  ProbabilityMatrix m(static_cast<int>(values.size()), kind, quantity, ranges);
  for (int k = 0; k < m.bins(); ++k)
    for (int h = 0; h < kHoursPerDay; ++h) m.at(k, h) = values[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)];
  return m;
}

inline const std::vector<std::string> kScenarioHeader{"hour", "scenario_id", "gen_kw", "dem_kw", "scenario_prob"};

inline void write_scenarios_csv(std::ostream& os, const ScenarioSet& set) {
  csv::write_row(os, kScenarioHeader);
  for (const auto& sc : set.scenarios)
    for (int h = 0; h < kHoursPerDay; ++h)
      csv::write_row(os, {std::to_string(h), std::to_string(sc.id), csv::format(sc.gen[h]), csv::format(sc.dem[h]),
                          csv::format(sc.prob)});
}

inline ScenarioSet read_scenarios_csv(std::istream& in) {
  csv::expect_header(in, kScenarioHeader);
  ScenarioSet set;
  std::map<long, std::size_t> slot;
  std::string line;
  long row = 1;
  while (csv::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != kScenarioHeader.size()) throw DataError("row " + std::to_string(row) + ": expected 5 fields");
    const long h = csv::parse_long(f[0], "hour", row);
    const long id = csv::parse_long(f[1], "scenario_id", row);
    if (h < 0 || h >= kHoursPerDay) throw DataError("row " + std::to_string(row) + ": hour out of range");
    auto [it, fresh] = slot.try_emplace(id, set.scenarios.size());
    if (fresh) set.scenarios.push_back(Scenario{static_cast<int>(id), {}, {}, 0.0});
    auto& sc = set.scenarios[it->second];
    sc.gen[h] = csv::parse_double(f[2], "gen_kw", row);
    sc.dem[h] = csv::parse_double(f[3], "dem_kw", row);
    sc.prob = csv::parse_double(f[4], "scenario_prob", row);
  }
  return set;
}

inline const std::vector<std::string> kFlowColumns{"pv_ld_kw", "pv_es_kw", "pv_gr_kw", "gr_ld_kw", "gr_es_kw",
                                                   "es_ld_kw", "es_gr_kw", "curtail_kw", "shed_kw"};

namespace detail {
inline void append_flows(std::vector<std::string>& row, const PowerFlows& f) {
  for (const double v : {f.pv_ld, f.pv_es, f.pv_gr, f.gr_ld, f.gr_es, f.es_ld, f.es_gr, f.curtail, f.shed})
    row.push_back(csv::format(v));
}
inline PowerFlows parse_flows(const std::vector<std::string>& f, std::size_t first, long row) {
  double v[9];
  for (std::size_t i = 0; i < 9; ++i) v[i] = csv::parse_double(f[first + i], kFlowColumns[i], row);
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
}
inline std::vector<std::string> with_flows(std::vector<std::string> head, std::vector<std::string> tail) {
  head.insert(head.end(), kFlowColumns.begin(), kFlowColumns.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}
}  // namespace detail

inline const std::vector<std::string> kScheduleHeader = detail::with_flows({"hour", "u_kw", "soc_pct"}, {});

// Probability-weighted planned flows per hour.
inline void write_schedule_csv(std::ostream& os, const DaySchedule& s) {
  csv::write_row(os, kScheduleHeader);
  for (int h = 0; h < s.horizon(); ++h) {
    double soc = 0.0;
    for (std::size_t i = 0; i < s.probs.size(); ++i) soc += s.probs[i] * s.planned_soc[i][static_cast<std::size_t>(h)];
    std::vector<std::string> row{std::to_string(h), csv::format(s.u[static_cast<std::size_t>(h)]), csv::format(soc)};
    detail::append_flows(row, s.expected_flows(h));
    csv::write_row(os, row);
  }
}

struct ScheduleRow {
  int hour = 0;
  double u = 0.0;
  double soc = 0.0;
  PowerFlows flows;
};

inline std::vector<ScheduleRow> read_schedule_csv(std::istream& in) {
  csv::expect_header(in, kScheduleHeader);
  std::vector<ScheduleRow> out;
  std::string line;
  long row = 1;
  while (csv::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != kScheduleHeader.size()) throw DataError("row " + std::to_string(row) + ": wrong field count");
    out.push_back({static_cast<int>(csv::parse_long(f[0], "hour", row)), csv::parse_double(f[1], "u_kw", row),
                   csv::parse_double(f[2], "soc_pct", row), detail::parse_flows(f, 3, row)});
  }
  return out;
}

inline const std::vector<std::string> kHourlyLogHeader =
    detail::with_flows({"timestamp", "policy", "pv_kw", "load_kw"}, {"soc_pct", "cost_eur", "pv_es_ld_kwh"});

struct LoggedHour {
  HourStamp t = 0;
  std::string policy;
  HourRecord record;
};

inline void write_hourly_log_csv(std::ostream& os, const std::string& policy, const std::vector<HourRecord>& log,
                                 HourStamp start) {
  csv::write_row(os, kHourlyLogHeader);
  for (const auto& r : log) {
    std::vector<std::string> row{format_timestamp(start + 24LL * r.day + r.hour), policy, csv::format(r.pv),
                                 csv::format(r.load)};
    detail::append_flows(row, r.flows);
    row.push_back(csv::format(r.soc_after));
    row.push_back(csv::format(r.cost));
    row.push_back(csv::format(r.pv_es_ld));
    csv::write_row(os, row);
  }
}

inline std::vector<LoggedHour> read_hourly_log_csv(std::istream& in) {
  csv::expect_header(in, kHourlyLogHeader);
  std::vector<LoggedHour> out;
  std::string line;
  long row = 1;
  HourStamp first = 0;
  while (csv::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != kHourlyLogHeader.size()) throw DataError("row " + std::to_string(row) + ": wrong field count");
    LoggedHour l;
    l.t = parse_timestamp(f[0]);
    if (out.empty()) first = l.t - hour_of(l.t);
    l.policy = f[1];
    auto& r = l.record;
    r.day = static_cast<int>((l.t - first) / 24);
    r.hour = hour_of(l.t);
    r.pv = csv::parse_double(f[2], "pv_kw", row);
    r.load = csv::parse_double(f[3], "load_kw", row);
    r.flows = detail::parse_flows(f, 4, row);
    r.soc_after = csv::parse_double(f[13], "soc_pct", row);
    r.cost = csv::parse_double(f[14], "cost_eur", row);
    r.pv_es_ld = csv::parse_double(f[15], "pv_es_ld_kwh", row);
    out.push_back(std::move(l));
  }
  return out;
}

inline const std::vector<std::string> kMetricsHeader{"policy", "SFR", "AEB", "ABCL", "TIEG", "TEEG"};

struct MetricsRow {
  std::string policy;
  MetricsReport metrics;
};

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  csv::write_row(os, kMetricsHeader);
  for (const auto& r : rows)
    csv::write_row(os, {r.policy, csv::format(r.metrics.sfr), csv::format(r.metrics.aeb), csv::format(r.metrics.abcl),
                        csv::format(r.metrics.tieg), csv::format(r.metrics.teeg)});
}

inline std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  csv::expect_header(in, kMetricsHeader);
  std::vector<MetricsRow> out;
  std::string line;
  long row = 1;
  while (csv::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != kMetricsHeader.size()) throw DataError("row " + std::to_string(row) + ": expected 6 fields");
    out.push_back({f[0],
                   {csv::parse_double(f[1], "SFR", row), csv::parse_double(f[2], "AEB", row),
                    csv::parse_double(f[3], "ABCL", row), csv::parse_double(f[4], "TIEG", row),
                    csv::parse_double(f[5], "TEEG", row)}});
  }
  return out;
}

}  // namespace bems
