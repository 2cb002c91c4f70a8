#pragma once

// Day-ahead forecast providers standing in for learned forecasters: exact,
// exact plus Gaussian error scaled by historical spread, and yesterday's values.

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bems/errors.hpp"
#include "bems/plant.hpp"
#include "bems/prob_model.hpp"
#include "bems/simulator.hpp"
#include "bems/solar_model.hpp"

namespace bems {

enum class ProviderKind { kOracle, kNoisyOracle, kPersistence };

inline const char* to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::kOracle: return "Oracle";
    case ProviderKind::kNoisyOracle: return "NoisyOracle";
    case ProviderKind::kPersistence: return "Persistence";
  }
  return "?";
}

inline ProviderKind parse_provider(std::string_view name) {
  for (const auto k : {ProviderKind::kOracle, ProviderKind::kNoisyOracle, ProviderKind::kPersistence})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown forecast provider: " + std::string(name));
}

// Error scales are heuristic; demand is noisier than PV.
struct ForecastSettings {
  ProviderKind kind = ProviderKind::kNoisyOracle;
  double alpha_gen = 0.15;
  double alpha_dem = 0.35;

  void validate() const {
    if (!(alpha_gen >= 0.0 && alpha_dem >= 0.0)) throw std::invalid_argument("forecast alphas must be >= 0");
  }
};

struct DayAheadForecast {
  HourlyArray<double> gen_mean{};
  HourlyArray<double> dem_mean{};
};

// `previous` is the day before `today`, or nullptr when it is not in the data.
template <class Rng>
DayAheadForecast forecast(const ForecastSettings& settings, const DayActuals& today, const DayActuals* previous,
                          const HourlyStats& gen_stats, const HourlyStats& dem_stats, const GeoLocation& loc,
                          int day_of_year, Rng& rng) {
  settings.validate();
  DayAheadForecast f;
  switch (settings.kind) {
    case ProviderKind::kOracle:
      f.gen_mean = today.pv;
      f.dem_mean = today.load;
      break;
    case ProviderKind::kNoisyOracle: {
      std::normal_distribution<double> z(0.0, 1.0);
      for (int h = 0; h < kHoursPerDay; ++h) {
        const double eg = z(rng);
        const double ed = z(rng);
        f.gen_mean[h] = std::max(0.0, today.pv[h] + settings.alpha_gen * gen_stats.sigma[h] * eg);
        f.dem_mean[h] = std::max(0.0, today.load[h] + settings.alpha_dem * dem_stats.sigma[h] * ed);
      }
      break;
    }
    case ProviderKind::kPersistence:
      if (previous == nullptr) throw DataError("persistence forecast needs the previous day");
      f.gen_mean = previous->pv;
      f.dem_mean = previous->load;
      break;
  }
  for (int h = 0; h < kHoursPerDay; ++h)
    if (solar_position(loc, day_of_year, h).cos_zenith <= 0.0) f.gen_mean[h] = 0.0;
  return f;
}

}  // namespace bems
