#pragma once

// Seeded synthetic building year: clear-sky PV scaled by an AR(1) daily
// clearness index, a two-peak household load and a four-band ToU tariff.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "bems/dataset.hpp"
#include "bems/solar_model.hpp"

namespace bems {

struct SynthConfig {
  std::string start_date = "2022-06-01";
  int history_days = 365;
  int eval_days = 30;
  std::uint64_t seed = 42;
  GeoLocation location;
  PlantConfig plant;
};

// Independent generator per (seed, day, stream).
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::int64_t day, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(day), static_cast<std::uint32_t>(static_cast<std::uint64_t>(day) >> 32),
                    stream};
  return std::mt19937_64(seq);
}

inline constexpr std::uint32_t kStreamWeather = 11;
inline constexpr std::uint32_t kStreamLoad = 12;
inline constexpr std::uint32_t kStreamTariff = 13;

inline double base_import_price(int hour) {
  if (hour < 7) return 0.10;
  if (hour < 17) return 0.20;
  if (hour < 21) return 0.30;
  return 0.15;
}

// Dividing by an exact power of ten lands on the double nearest the decimal,
// so the CSV shows the short form.
inline double round_decimals(double x, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(x * scale) / scale;
}

// Rounded down so a PV value never exceeds the clear-sky maximum it came from.
inline double floor_decimals(double x, int digits) {
  const double scale = std::pow(10.0, digits);
  double n = std::floor(x * scale);
  while (n > 0.0 && n / scale > x) n -= 1.0;
  return n / scale;
}

inline Dataset synthesize(const SynthConfig& cfg) {
  cfg.location.validate();
  cfg.plant.validate();
  if (cfg.history_days < 0 || cfg.eval_days < 0 || cfg.history_days + cfg.eval_days < 1)
    throw std::invalid_argument("synthetic dataset needs at least one day");
  const HourStamp t0 = parse_timestamp(cfg.start_date);
  if (hour_of(t0) != 0) throw std::invalid_argument("synthetic start must be midnight");
  const int total = cfg.history_days + cfg.eval_days;
  Dataset d;
  d.rows.reserve(static_cast<std::size_t>(total) * kHoursPerDay);
  double clearness = 0.6;
  for (int day = 0; day < total; ++day) {
    const HourStamp midnight = t0 + 24LL * day;
    const int doy = day_of_year(midnight);
    const auto weekday = std::chrono::weekday{std::chrono::sys_days{civil_date(midnight)}};
    const bool weekend = weekday == std::chrono::Saturday || weekday == std::chrono::Sunday;
    auto weather = stream_rng(cfg.seed, day, kStreamWeather);
    auto load_rng = stream_rng(cfg.seed, day, kStreamLoad);
    auto tariff_rng = stream_rng(cfg.seed, day, kStreamTariff);
    std::normal_distribution<double> z(0.0, 1.0);

    clearness = std::clamp(0.6 + 0.7 * (clearness - 0.6) + 0.18 * z(weather), 0.05, 1.0);
    const double season = 1.0 + 0.25 * std::cos(2.0 * std::numbers::pi * (doy - 15) / 365.0);
    const double price_factor = std::clamp(1.0 + 0.08 * z(tariff_rng), 0.8, 1.2);
    for (int h = 0; h < kHoursPerDay; ++h) {
      HourRow r;
      r.t = midnight + h;
      const double cs = clear_sky_pv(cfg.location, doy, h, cfg.plant);
      const double cloud = std::clamp(clearness * (1.0 + 0.1 * z(weather)), 0.0, 1.0);
      r.pv_kw = floor_decimals(cs * cloud, 4);

      const double morning = (weekend ? 0.7 : 1.1) * std::exp(-0.5 * (h - (weekend ? 9.0 : 7.5)) * (h - (weekend ? 9.0 : 7.5)));
      const double evening = 2.0 * std::exp(-0.5 * (h - 19.0) * (h - 19.0) / 2.0);
      const double midday = weekend ? 0.5 : 0.2;
      const double shape = 0.45 + morning + evening + (h >= 10 && h <= 16 ? midday : 0.0);
      r.demand_kw = round_decimals(std::clamp(shape * season * std::exp(0.18 * z(load_rng)), 0.1, 4.5), 4);

      r.tou_imp = round_decimals(base_import_price(h) * price_factor, 5);
      r.tou_exp = round_decimals(0.4 * r.tou_imp, 5);
      d.rows.push_back(r);
    }
  }
  return d;
}

}  // namespace bems
