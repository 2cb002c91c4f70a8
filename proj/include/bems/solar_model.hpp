#pragma once

// Sun position, clear-sky irradiance and the per-day PV envelope used to
// remove seasonality from historical PV records. Hours are local solar time.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "bems/errors.hpp"
#include "bems/plant.hpp"

namespace bems {

inline constexpr int kDaysPerYearMax = 366;
inline constexpr int kEnvelopeHalfWindow = 30;  // days either side
inline constexpr double kNightThresholdKw = 1e-6;

struct SolarPosition {
  double declination = 0.0;  // degrees
  double hour_angle = 0.0;   // degrees
  double cos_zenith = 0.0;
};

namespace detail {
inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
}  // namespace detail

inline SolarPosition solar_position(const GeoLocation& loc, int day_of_year, int hour_of_day) {
  loc.validate();
  if (day_of_year < 1 || day_of_year > kDaysPerYearMax)
    throw std::invalid_argument("day_of_year outside [1, 366]");
  if (hour_of_day < 0 || hour_of_day > 23) throw std::invalid_argument("hour_of_day outside [0, 23]");
  SolarPosition pos;
  pos.declination = 23.45 * std::sin(detail::deg2rad(360.0 * (284.0 + day_of_year) / 365.0));
  pos.hour_angle = 15.0 * (hour_of_day - 12.0);
  const double phi = detail::deg2rad(loc.latitude);
  const double delta = detail::deg2rad(pos.declination);
  const double omega = detail::deg2rad(pos.hour_angle);
  pos.cos_zenith = std::clamp(
      std::sin(phi) * std::sin(delta) + std::cos(phi) * std::cos(delta) * std::cos(omega), -1.0, 1.0);
  return pos;
}

// Haurwitz clear-sky global horizontal irradiance, W/m^2.
inline double clear_sky_ghi(const SolarPosition& pos) {
  if (pos.cos_zenith <= 0.0) return 0.0;
  return 1098.0 * pos.cos_zenith * std::exp(-0.057 / pos.cos_zenith);
}

inline double pv_power_from_ghi(double ghi, const PlantConfig& plant) {
  if (!(ghi >= 0.0)) throw std::invalid_argument("ghi must be >= 0");
  return std::min(plant.pv_stc * (ghi / 1000.0) * plant.pv_derate, plant.p_pv_max);
}

inline double clear_sky_pv(const GeoLocation& loc, int day_of_year, int hour, const PlantConfig& plant) {
  return pv_power_from_ghi(clear_sky_ghi(solar_position(loc, day_of_year, hour)), plant);
}

// One hourly PV observation keyed by calendar position.
struct PvSample {
  int day_index;    // consecutive day counter, used for the continuity check
  int day_of_year;  // 1..366
  int hour;         // 0..23
  double kw;
};

// Theoretical maximum and rolling-window historical minimum, per (day, hour).
class PvEnvelope {
 public:
  PvEnvelope() : p_max_(kDaysPerYearMax * kHoursPerDay, 0.0), p_min_(p_max_), covered_(kDaysPerYearMax, false) {}

  double p_max(int day_of_year, int hour) const { return p_max_[index(day_of_year, hour)]; }
  double p_min(int day_of_year, int hour) const {
    if (!covered(day_of_year))
      throw InsufficientHistory("no history within the window around day " + std::to_string(day_of_year));
    return p_min_[index(day_of_year, hour)];
  }
  bool covered(int day_of_year) const { return covered_.at(static_cast<std::size_t>(day_of_year - 1)); }
  bool is_night(int day_of_year, int hour) const { return p_max(day_of_year, hour) <= kNightThresholdKw; }
  long clamped_samples() const { return clamped_; }

 private:
  friend PvEnvelope build_envelope(std::span<const PvSample>, const GeoLocation&, const PlantConfig&);
  static std::size_t index(int day_of_year, int hour) {
    if (day_of_year < 1 || day_of_year > kDaysPerYearMax || hour < 0 || hour >= kHoursPerDay)
      throw std::out_of_range("envelope index out of range");
    return static_cast<std::size_t>((day_of_year - 1) * kHoursPerDay + hour);
  }

  std::vector<double> p_max_;
  std::vector<double> p_min_;
  std::vector<bool> covered_;
  long clamped_ = 0;
};

// Circular distance between days of year on a 365-day cycle (366 maps next to 365).
inline int day_of_year_distance(int a, int b) {
  const int d = std::abs(a - b) % 365;
  return std::min(d, 365 - d);
}

inline PvEnvelope build_envelope(std::span<const PvSample> history, const GeoLocation& loc,
                                 const PlantConfig& plant) {
  loc.validate();
  // Require at least 61 consecutive fully observed days.
  {
    std::vector<int> per_day;
    int first = history.empty() ? 0 : history.front().day_index;
    int last = first;
    for (const auto& s : history) {
      first = std::min(first, s.day_index);
      last = std::max(last, s.day_index);
    }
    per_day.assign(static_cast<std::size_t>(last - first + 1), 0);
    for (const auto& s : history) ++per_day[static_cast<std::size_t>(s.day_index - first)];
    int run = 0, best = 0;
    for (const int c : per_day) {
      run = c >= kHoursPerDay ? run + 1 : 0;
      best = std::max(best, run);
    }
    if (history.empty() || best < 2 * kEnvelopeHalfWindow + 1)
      throw InsufficientHistory("PV envelope needs at least 61 consecutive days of hourly history");
  }

  PvEnvelope env;
  for (int d = 1; d <= kDaysPerYearMax; ++d)
    for (int h = 0; h < kHoursPerDay; ++h) env.p_max_[PvEnvelope::index(d, h)] = clear_sky_pv(loc, d, h, plant);

  // Minimum per observed (day_of_year, hour) after clamping to the envelope.
  std::vector<double> observed_min(kDaysPerYearMax * kHoursPerDay, std::numeric_limits<double>::infinity());
  std::vector<bool> observed(kDaysPerYearMax, false);
  for (const auto& s : history) {
    if (s.kw < 0.0) throw DataError("negative PV observation");
    const auto idx = PvEnvelope::index(s.day_of_year, s.hour);
    double v = s.kw;
    if (v > env.p_max_[idx]) {
      v = env.p_max_[idx];
      ++env.clamped_;
    }
    observed_min[idx] = std::min(observed_min[idx], v);
    observed[static_cast<std::size_t>(s.day_of_year - 1)] = true;
  }
  if (env.clamped_ > 0)
    std::clog << "warning: " << env.clamped_ << " PV observations above the clear-sky maximum were clamped\n";

  for (int d = 1; d <= kDaysPerYearMax; ++d) {
    bool any = false;
    for (int h = 0; h < kHoursPerDay; ++h) {
      double lo = std::numeric_limits<double>::infinity();
      for (int w = 1; w <= kDaysPerYearMax; ++w) {
        if (!observed[static_cast<std::size_t>(w - 1)] || day_of_year_distance(d, w) > kEnvelopeHalfWindow)
          continue;
        lo = std::min(lo, observed_min[PvEnvelope::index(w, h)]);
        any = true;
      }
      const auto idx = PvEnvelope::index(d, h);
      env.p_min_[idx] = std::isfinite(lo) ? std::clamp(lo, 0.0, env.p_max_[idx]) : 0.0;
      if (env.p_max_[idx] <= kNightThresholdKw) env.p_min_[idx] = 0.0;
    }
    env.covered_[static_cast<std::size_t>(d - 1)] = any;
  }
  return env;
}

}  // namespace bems
