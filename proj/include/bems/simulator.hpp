#pragma once

// Hour-by-hour execution of day plans against actual data, battery and PV
// provenance bookkeeping, and the annual benchmark metrics.

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bems/dispatch_opt.hpp"
#include "bems/plant.hpp"
#include "bems/policies.hpp"

namespace bems {

struct SimState {
  double soc = 50.0;          // %
  double pv_fraction = 0.0;   // share of stored energy that came from PV
};

// What a day plan expects for one hour; execution compares against it.
struct HourTarget {
  double u = 0.0;         // planned net battery power, kW
  double expected_pv = 0.0;
};

struct HourRecord {
  int day = 0;
  int hour = 0;
  double pv = 0.0;
  double load = 0.0;
  PowerFlows flows;
  double soc_after = 0.0;
  double cost = 0.0;        // EUR
  double pv_es_ld = 0.0;    // kWh of PV energy that reached the load through the battery
};

namespace detail {

inline SimState advance(const SimState& s, const PowerFlows& f, const PlantConfig& plant, double& pv_es_ld) {
  SimState next = s;
  const double stored = s.soc * plant.e_cap / 100.0;
  pv_es_ld = s.pv_fraction * f.es_ld * plant.delta_t;
  if (f.charge() > 0.0) {
    const double added = plant.eta_c * f.charge() * plant.delta_t;
    const double added_pv = plant.eta_c * f.pv_es * plant.delta_t;
    next.pv_fraction = std::clamp((s.pv_fraction * stored + added_pv) / (stored + added), 0.0, 1.0);
  }
  next.soc = std::clamp(plant.next_soc(s.soc, f.charge(), f.discharge()), plant.soc_min, plant.soc_max);
  return next;
}

// Route PV, load and a net battery power b (charge > 0) through the bus.
inline PowerFlows split_flows(double pv, double load, double b) {
  PowerFlows f;
  f.pv_ld = std::min(pv, load);
  const double surplus = pv - f.pv_ld;
  const double deficit = load - f.pv_ld;
  if (b > 0.0) {
    f.pv_es = std::min(surplus, b);
    f.gr_es = b - f.pv_es;
    f.pv_gr = surplus - f.pv_es;
    f.gr_ld = deficit;
  } else {
    const double d = -b;
    f.es_ld = std::min(d, deficit);
    f.es_gr = d - f.es_ld;
    f.gr_ld = deficit - f.es_ld;
    f.pv_gr = surplus;
  }
  return f;
}

}  // namespace detail

inline HourRecord finish_hour(int day, int hour, double pv, double load, const PowerFlows& f, SimState& state,
                              const PlantConfig& plant, const TariffDay& tariffs) {
  HourRecord r{day, hour, pv, load, f, 0.0, 0.0, 0.0};
  state = detail::advance(state, f, plant, r.pv_es_ld);
  r.soc_after = state.soc;
  r.cost = plant.delta_t * (f.grid_import() * tariffs.tou_imp[hour] - f.grid_export() * tariffs.tou_exp[hour]);
  return r;
}

// Follow a planned battery setpoint with intraday compensation: PV beyond the
// plan's expectation goes to the battery first, shortages are bought from the
// grid. Converter limits are enforced by trimming grid charging or export
// discharging, then by extra discharge, then by shedding or curtailing.
inline PowerFlows execute_plan_hour(const HourTarget& target, double pv, double load, const SimState& state,
                                    const PlantConfig& plant) {
  if (!(pv >= 0.0 && load >= 0.0)) throw std::invalid_argument("pv and load must be >= 0");
  pv = std::min(pv, plant.p_pv_max);
  const double c_max = std::min(plant.p_es_max, plant.charge_headroom_kw(state.soc));
  const double d_max = std::min(plant.p_es_max, plant.discharge_available_kw(state.soc));
  double b = std::clamp(target.u, -d_max, c_max);
  const double extra = std::min(std::max(0.0, pv - target.expected_pv), std::max(0.0, pv - load - b));
  if (extra > 0.0) b = std::min(b + extra, c_max);

  double net = load - pv + b;
  double shed = 0.0, curtail = 0.0;
  if (net > plant.p_gr_max) {
    if (b > 0.0) b = std::max(0.0, b - (net - plant.p_gr_max));
    net = load - pv + b;
    if (net > plant.p_gr_max) b = std::max(-d_max, b - (net - plant.p_gr_max));
    net = load - pv + b;
    shed = std::max(0.0, net - plant.p_gr_max);
  } else if (net < -plant.p_gr_max) {
    if (b < 0.0) b = std::min(0.0, b + (-plant.p_gr_max - net));
    net = load - pv + b;
    curtail = std::max(0.0, -plant.p_gr_max - net);
  }
  auto f = detail::split_flows(pv - curtail, load - shed, b);
  f.curtail = curtail;
  f.shed = shed;
  return f;
}

struct MetricsReport {
  double sfr = 0.0;   // %, PV self-consumption ratio
  double aeb = 0.0;   // EUR, electricity bill
  double abcl = 0.0;  // %, mean hourly SoC
  double tieg = 0.0;  // kWh imported
  double teeg = 0.0;  // kWh exported
};

// Ratio of sums: 100 * (PV to load directly or via the battery) / PV produced.
inline MetricsReport compute_metrics(std::span<const HourRecord> log, const PlantConfig& plant) {
  MetricsReport m;
  double pv_total = 0.0, pv_used = 0.0, soc_sum = 0.0;
  for (const auto& r : log) {
    m.aeb += r.cost;
    m.tieg += r.flows.grid_import() * plant.delta_t;
    m.teeg += r.flows.grid_export() * plant.delta_t;
    pv_total += std::min(r.pv, plant.p_pv_max) * plant.delta_t;
    pv_used += r.flows.pv_ld * plant.delta_t + r.pv_es_ld;
    soc_sum += r.soc_after;
  }
  m.sfr = pv_total > 0.0 ? std::clamp(100.0 * pv_used / pv_total, 0.0, 100.0) : 0.0;
  m.abcl = log.empty() ? 0.0 : soc_sum / static_cast<double>(log.size());
  return m;
}

struct DayActuals {
  HourlyArray<double> pv{};
  HourlyArray<double> load{};
  TariffDay tariffs;
};

// Runs one day; plan == nullopt means the hourly rule.
inline std::vector<HourRecord> run_day(int day, const std::optional<DaySchedule>& plan, const DayActuals& actual,
                                       SimState& state, const PlantConfig& plant) {
  std::vector<HourRecord> out;
  out.reserve(kHoursPerDay);
  for (int h = 0; h < kHoursPerDay; ++h) {
    PowerFlows f;
    if (plan) {
      HourTarget target{plan->u.at(static_cast<std::size_t>(h)), 0.0};
      const auto e = plan->expected_flows(h);
      target.expected_pv = e.pv_used() + e.curtail;
      f = execute_plan_hour(target, actual.pv[h], actual.load[h], state, plant);
    } else {
      f = rule_based_step(actual.pv[h], actual.load[h], state.soc, plant);
    }
    out.push_back(finish_hour(day, h, actual.pv[h], actual.load[h], f, state, plant, actual.tariffs));
  }
  return out;
}

struct SimulationResult {
  std::vector<HourRecord> log;
  std::vector<DaySchedule> plans;  // empty for RuleBased
  MetricsReport metrics;
  SimState final_state;
};

// planner(day_index, soc0) returns the plan for that day, or nullopt for the rule.
using DayPlanner = std::function<std::optional<DaySchedule>(int day, double soc0)>;

inline SimulationResult run_horizon(std::span<const DayActuals> days, const DayPlanner& planner,
                                    const PlantConfig& plant, SimState state) {
  plant.validate();
  if (days.empty()) throw std::invalid_argument("simulation needs at least one day");
  SimulationResult res;
  for (std::size_t d = 0; d < days.size(); ++d) {
    const auto plan = planner(static_cast<int>(d), state.soc);
    if (plan) res.plans.push_back(*plan);
    auto day_log = run_day(static_cast<int>(d), plan, days[d], state, plant);
    res.log.insert(res.log.end(), day_log.begin(), day_log.end());
  }
  res.metrics = compute_metrics(res.log, plant);
  res.final_state = state;
  return res;
}

}  // namespace bems
