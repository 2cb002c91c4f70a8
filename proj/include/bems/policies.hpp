#pragma once

// The four benchmark decision policies: an hourly priority rule and three
// day-ahead planners that differ only in what they believe about the day.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bems/dispatch_opt.hpp"
#include "bems/plant.hpp"
#include "bems/prob_model.hpp"
#include "bems/scenario_gen.hpp"

namespace bems {

enum class PolicyKind { kRuleBased, kDeterministic, kIdealForecast, kStochasticProposed };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::kRuleBased, PolicyKind::kDeterministic,
                                              PolicyKind::kIdealForecast, PolicyKind::kStochasticProposed};

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kRuleBased: return "RuleBased";
    case PolicyKind::kDeterministic: return "Deterministic";
    case PolicyKind::kIdealForecast: return "IdealForecast";
    case PolicyKind::kStochasticProposed: return "StochasticProposed";
  }
  return "?";
}

inline PolicyKind parse_policy(std::string_view name) {
  for (const auto k : kAllPolicies)
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown policy: " + std::string(name));
}

// Serve load from PV, then battery, then grid; store surplus, then export.
// Never charges from the grid.
inline PowerFlows rule_based_step(double pv, double load, double soc, const PlantConfig& plant) {
  if (!(pv >= 0.0 && load >= 0.0)) throw std::invalid_argument("pv and load must be >= 0");
  pv = std::min(pv, plant.p_pv_max);
  PowerFlows f;
  f.pv_ld = std::min(pv, load);
  double surplus = pv - f.pv_ld;
  double deficit = load - f.pv_ld;
  f.pv_es = std::min({surplus, plant.p_es_max, plant.charge_headroom_kw(soc)});
  surplus -= f.pv_es;
  f.pv_gr = std::min(surplus, plant.p_gr_max);
  f.curtail = surplus - f.pv_gr;
  f.es_ld = std::min({deficit, plant.p_es_max, plant.discharge_available_kw(soc)});
  deficit -= f.es_ld;
  f.gr_ld = std::min(deficit, plant.p_gr_max);
  f.shed = deficit - f.gr_ld;
  return f;
}

struct ScenarioConfig {
  int count = kDefaultScenarioCount;  // S
  int keep = kDefaultSelected;        // s-hat
  double lambda = 0.5;                // forecast weight in the combination
  bool shuffle_strata = false;

  void validate() const {
    if (count < 1 || keep < 1 || keep > count) throw std::invalid_argument("scenario counts need 1 <= keep <= count");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda outside [0, 1]");
  }
};

// What a planner may look at for one day. Actuals are only read by IdealForecast.
struct DayInputs {
  int day_of_year = 1;
  HourlyArray<double> forecast_gen{};
  HourlyArray<double> forecast_dem{};
  HourlyArray<double> actual_gen{};
  HourlyArray<double> actual_dem{};
  TariffDay tariffs;
};

inline ProbabilityMatrix forecast_gen_matrix(const HistoricalModel& hist, const HourlyArray<double>& forecast,
                                             int day_of_year) {
  const auto ranges = pv_ranges_for_day(hist.envelope, day_of_year);
  return forecast_matrix(forecast, hist.gen_stats, ranges, hist.pv_classes.bins(), Quantity::kGeneration);
}

inline ProbabilityMatrix forecast_dem_matrix(const HistoricalModel& hist, const HourlyArray<double>& forecast) {
  return forecast_matrix(forecast, hist.dem_stats, hist.dem_range, Quantity::kDemand);
}

inline ProbabilityMatrix total_gen_matrix(const HistoricalModel& hist, const HourlyArray<double>& forecast,
                                          int day_of_year, double lambda) {
  return combine(forecast_gen_matrix(hist, forecast, day_of_year),
                 anchor_pv_matrix(hist.pv_classes, hist.envelope, day_of_year), lambda);
}

inline ProbabilityMatrix total_dem_matrix(const HistoricalModel& hist, const HourlyArray<double>& forecast,
                                          double lambda) {
  return combine(forecast_dem_matrix(hist, forecast), hist.demand, lambda);
}

// Sample, score, keep the most probable and zero PV before sunrise and after sunset.
template <class Rng>
ScenarioSet make_scenarios(const ProbabilityMatrix& gen, const ProbabilityMatrix& dem, const GeoLocation& loc,
                           int day_of_year, const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  auto set = generate(gen, dem, ScenarioOptions{cfg.count, cfg.shuffle_strata}, rng);
  score(set, gen, dem);
  return apply_night_mask(select_top(set, cfg.keep), loc, day_of_year);
}

struct PlannerSettings {
  ScenarioConfig scenarios;
  SolverOptions solver;
};

template <class Rng>
DaySchedule plan_stochastic(const ProbabilityMatrix& gen, const ProbabilityMatrix& dem, const HistoricalModel& hist,
                            const DayInputs& day, const PlantConfig& plant, double soc0,
                            const PlannerSettings& settings, Rng& rng) {
  const auto set = make_scenarios(gen, dem, hist.location, day.day_of_year, settings.scenarios, rng);
  return solve_day(set, day.tariffs, plant, soc0, settings.solver);
}

// RuleBased has no plan and yields nullopt.
template <class Rng>
std::optional<DaySchedule> make_day_plan(PolicyKind kind, const DayInputs& day, const HistoricalModel& hist,
                                         const PlantConfig& plant, double soc0, const PlannerSettings& settings,
                                         Rng& rng) {
  switch (kind) {
    case PolicyKind::kRuleBased:
      return std::nullopt;
    case PolicyKind::kIdealForecast:
      return plan_deterministic(day.actual_gen, day.actual_dem, day.tariffs, plant, soc0, settings.solver);
    case PolicyKind::kDeterministic:
      return plan_deterministic(day.forecast_gen, day.forecast_dem, day.tariffs, plant, soc0, settings.solver);
    case PolicyKind::kStochasticProposed: {
      const double lambda = settings.scenarios.lambda;
      const auto gen = total_gen_matrix(hist, day.forecast_gen, day.day_of_year, lambda);
      const auto dem = total_dem_matrix(hist, day.forecast_dem, lambda);
      return plan_stochastic(gen, dem, hist, day, plant, soc0, settings, rng);
    }
  }
  throw std::invalid_argument("unknown policy");
}

}  // namespace bems
