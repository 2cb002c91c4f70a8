#pragma once

// End-to-end wiring: dataset -> historical model -> per-day forecasts and
// plans -> simulated policies. Everything random is drawn from a generator
// keyed by (seed, calendar day, stream), so a day's inputs do not depend on
// which policy or command asked for them.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bems/config.hpp"
#include "bems/dataset.hpp"
#include "bems/forecasting.hpp"
#include "bems/policies.hpp"
#include "bems/prob_model.hpp"
#include "bems/simulator.hpp"
#include "bems/synth.hpp"

namespace bems {

inline constexpr std::uint32_t kStreamForecast = 1;
inline constexpr std::uint32_t kStreamScenarios = 2;

inline HistoricalModel model_from_days(std::span<const DayRecord> days, const GeoLocation& loc,
                                       const PlantConfig& plant, int bins) {
  if (days.empty()) throw InsufficientHistory("no history before the evaluation window");
  std::vector<PvSample> pv;
  std::vector<HourlySample> dem;
  pv.reserve(days.size() * kHoursPerDay);
  dem.reserve(days.size() * kHoursPerDay);
  const HourStamp first = days.front().start;
  for (const auto& d : days) {
    const int index = static_cast<int>((d.start - first) / 24);
    for (int h = 0; h < kHoursPerDay; ++h) {
      pv.push_back({index, d.day_of_year, h, d.actual.pv[h]});
      dem.push_back({h, d.actual.load[h]});
    }
  }
  return build_historical_model(pv, dem, loc, plant, bins);
}

inline std::int64_t day_number(HourStamp midnight) { return midnight / 24; }

class Workspace {
 public:
  Workspace(RunConfig cfg, const Dataset& data) : cfg_(std::move(cfg)), days_(split_days(data)) {
    cfg_.validate();
    const HourStamp from = parse_timestamp(cfg_.eval_from);
    const HourStamp to = parse_timestamp(cfg_.eval_to);
    if (to < from) throw std::invalid_argument("evaluation end precedes its start");
    std::size_t first = days_.size(), last = 0;
    for (std::size_t i = 0; i < days_.size(); ++i) {
      if (days_[i].start >= from && days_[i].start <= to) {
        first = std::min(first, i);
        last = i;
      }
    }
    if (first == days_.size()) throw DataError("no complete day of data between " + cfg_.eval_from + " and " + cfg_.eval_to);
    if (days_[first].start != from - hour_of(from) || days_[last].start != to - hour_of(to))
      throw DataError("data does not cover " + cfg_.eval_from + " to " + cfg_.eval_to);
    eval_first_ = first;
    eval_count_ = last - first + 1;
    hist_ = model_from_days(std::span(days_).first(first), cfg_.location, cfg_.plant, cfg_.bins);
  }

  static Workspace load(const RunConfig& cfg) {
    std::vector<std::filesystem::path> paths(cfg.data.begin(), cfg.data.end());
    return Workspace(cfg, ingest(paths));
  }

  const RunConfig& config() const { return cfg_; }
  const HistoricalModel& history() const { return *hist_; }
  std::span<const DayRecord> evaluation_days() const { return std::span(days_).subspan(eval_first_, eval_count_); }

  // Index into the full day list of the evaluation day with this date.
  std::size_t day_index(const std::string& date) const {
    const HourStamp t = parse_timestamp(date);
    for (std::size_t i = eval_first_; i < eval_first_ + eval_count_; ++i)
      if (days_[i].start == t) return i;
    throw DataError("date " + date + " is not inside the evaluation window");
  }

  const DayRecord& day(std::size_t index) const { return days_.at(index); }

  DayInputs inputs(std::size_t index) const {
    const auto& d = days_.at(index);
    auto rng = stream_rng(cfg_.seed, day_number(d.start), kStreamForecast);
    const DayActuals* prev = nullptr;
    if (index > 0 && days_[index - 1].start + 24 == d.start) prev = &days_[index - 1].actual;
    const auto fc = forecast(cfg_.forecast, d.actual, prev, hist_->gen_stats, hist_->dem_stats, cfg_.location,
                             d.day_of_year, rng);
    DayInputs in;
    in.day_of_year = d.day_of_year;
    in.forecast_gen = fc.gen_mean;
    in.forecast_dem = fc.dem_mean;
    in.actual_gen = d.actual.pv;
    in.actual_dem = d.actual.load;
    in.tariffs = d.actual.tariffs;
    return in;
  }

  std::mt19937_64 scenario_rng(std::size_t index) const {
    return stream_rng(cfg_.seed, day_number(days_.at(index).start), kStreamScenarios);
  }

  PlannerSettings planner_settings() const { return {cfg_.scenarios, cfg_.solver}; }

  std::optional<DaySchedule> plan(PolicyKind kind, std::size_t index, double soc0) const {
    auto rng = scenario_rng(index);
    return make_day_plan(kind, inputs(index), *hist_, cfg_.plant, soc0, planner_settings(), rng);
  }

  SimulationResult simulate(PolicyKind kind) const {
    std::vector<DayActuals> actuals;
    for (const auto& d : evaluation_days()) actuals.push_back(d.actual);
    const DayPlanner planner = [&](int d, double soc0) {
      return plan(kind, eval_first_ + static_cast<std::size_t>(d), soc0);
    };
    return run_horizon(actuals, planner, cfg_.plant, SimState{cfg_.plant.soc_init, 0.0});
  }

 private:
  RunConfig cfg_;
  std::vector<DayRecord> days_;
  std::size_t eval_first_ = 0;
  std::size_t eval_count_ = 0;
  std::optional<HistoricalModel> hist_;
};

}  // namespace bems
