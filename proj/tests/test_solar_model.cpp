#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "bems/solar_model.hpp"

using bems::GeoLocation;
using bems::PlantConfig;
using bems::PvSample;

namespace {

std::vector<PvSample> daily_history(int first_doy, int days, const std::function<double(int, int)>& kw) {
  std::vector<PvSample> out;
  for (int i = 0; i < days; ++i) {
    const int doy = (first_doy - 1 + i) % 365 + 1;
    for (int h = 0; h < 24; ++h) out.push_back({i, doy, h, kw(doy, h)});
  }
  return out;
}

double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

}  // namespace

TEST(SolarPosition, EquinoxNoonOnEquator) {
  const auto pos = bems::solar_position({0.0, 0.0}, 81, 12);
  // 23.45 * sin(360 * 365 / 365) = 0 exactly up to rounding.
  EXPECT_NEAR(pos.declination, 0.0, 1e-9);
  EXPECT_NEAR(pos.hour_angle, 0.0, 1e-12);
  EXPECT_NEAR(pos.cos_zenith, 1.0, 1e-12);
}

TEST(SolarPosition, MidnightIsNight) {
  for (const double lat : {-60.0, -20.0, 0.0, 35.0, 51.5, 65.0})
    for (int day = 1; day <= 366; day += 15) EXPECT_LT(bems::solar_position({lat, 0.0}, day, 0).cos_zenith, 0.0);
}

TEST(SolarPosition, LondonSummerSolsticeZenith) {
  const auto pos = bems::solar_position({51.5, -0.13}, 172, 12);
  // Declination on day 172 is 23.45 * sin(360 * 456 / 365 deg) = 23.4498 deg.
  EXPECT_NEAR(pos.declination, 23.4498, 1e-3);
  EXPECT_NEAR(rad2deg(std::acos(pos.cos_zenith)), 51.5 - 23.4498, 1e-3);
}

TEST(SolarPosition, StaysInRange) {
  for (int day = 1; day <= 366; ++day)
    for (int h = 0; h < 24; ++h) {
      const auto pos = bems::solar_position({-33.9, 151.2}, day, h);
      EXPECT_LE(std::abs(pos.declination), 23.45);
      EXPECT_LE(std::abs(pos.cos_zenith), 1.0);
    }
}

TEST(SolarPosition, RejectsOutOfRangeInputs) {
  EXPECT_THROW(bems::solar_position({0, 0}, 0, 12), std::invalid_argument);
  EXPECT_THROW(bems::solar_position({0, 0}, 367, 12), std::invalid_argument);
  EXPECT_THROW(bems::solar_position({0, 0}, 10, 24), std::invalid_argument);
  EXPECT_THROW(bems::solar_position({91, 0}, 10, 12), std::invalid_argument);
  EXPECT_THROW(bems::solar_position({0, 181}, 10, 12), std::invalid_argument);
}

TEST(ClearSky, HaurwitzValues) {
  EXPECT_EQ(bems::clear_sky_ghi({0, 0, 0.0}), 0.0);
  EXPECT_EQ(bems::clear_sky_ghi({0, 0, -0.3}), 0.0);
  EXPECT_NEAR(bems::clear_sky_ghi({0, 0, 1.0}), 1098.0 * std::exp(-0.057), 1e-9);
  EXPECT_NEAR(bems::clear_sky_ghi({0, 0, 1.0}), 1037.2, 0.05);
  EXPECT_LT(bems::clear_sky_ghi({0, 0, 0.5}), bems::clear_sky_ghi({0, 0, 0.9}));
}

TEST(ClearSky, StrictlyIncreasingAndContinuous) {
  double prev = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double cz = i / 10000.0;
    const double g = bems::clear_sky_ghi({0, 0, cz});
    EXPECT_GT(g, prev);
    // Derivative is bounded by 1098 * (1 + 0.057 / cz) * exp(-0.057 / cz) <= 1098 * 1.06.
    EXPECT_LT(g - prev, 1098.0 * 1.1 / 10000.0 + 1e-9);
    prev = g;
  }
}

TEST(PvPower, ConversionAndCap) {
  PlantConfig plant;
  EXPECT_EQ(bems::pv_power_from_ghi(0.0, plant), 0.0);
  EXPECT_NEAR(bems::pv_power_from_ghi(1000.0, plant), 8.5, 1e-12);
  EXPECT_EQ(bems::pv_power_from_ghi(2000.0, plant), 12.0);
  EXPECT_THROW(bems::pv_power_from_ghi(-1.0, plant), std::invalid_argument);
}

TEST(Envelope, AllZeroHistoryGivesZeroMinimum) {
  const auto hist = daily_history(1, 365, [](int, int) { return 0.0; });
  const auto env = bems::build_envelope(hist, GeoLocation{}, PlantConfig{});
  for (int d = 1; d <= 366; ++d)
    for (int h = 0; h < 24; ++h) EXPECT_EQ(env.p_min(d, h), 0.0);
}

TEST(Envelope, NightHoursAreZero) {
  const GeoLocation loc;
  const PlantConfig plant;
  const auto hist = daily_history(1, 365, [&](int d, int h) { return bems::clear_sky_pv(loc, d, h, plant); });
  const auto env = bems::build_envelope(hist, loc, plant);
  for (int d = 1; d <= 366; ++d)
    for (int h = 0; h < 24; ++h) {
      if (bems::solar_position(loc, d, h).cos_zenith > 0.0) continue;
      EXPECT_EQ(env.p_max(d, h), 0.0);
      EXPECT_EQ(env.p_min(d, h), 0.0);
      EXPECT_TRUE(env.is_night(d, h));
    }
}

TEST(Envelope, HalfClearSkyHistoryMatchesWindowMinimum) {
  const GeoLocation loc;
  const PlantConfig plant;
  const auto half = [&](int d, int h) { return 0.5 * bems::clear_sky_pv(loc, d, h, plant); };
  const auto env = bems::build_envelope(daily_history(1, 365, half), loc, plant);
  for (int d = 1; d <= 366; d += 7)
    for (int h = 0; h < 24; ++h) {
      // Brute-force minimum over the wrapped +/-30 day window.
      double expect = 1e300;
      for (int off = -30; off <= 30; ++off) expect = std::min(expect, half(((d - 1 + off) % 365 + 365) % 365 + 1, h));
      EXPECT_NEAR(env.p_min(d, h), expect, 1e-12) << d << "," << h;
      EXPECT_LE(env.p_min(d, h), 0.5 * env.p_max(d, h) + 1e-12);
    }
  // Around the solstice the clear-sky curve is flat, so the window minimum is
  // close to the pointwise half.
  EXPECT_NEAR(env.p_min(172, 12), 0.5 * env.p_max(172, 12), 0.05 * env.p_max(172, 12));
}

TEST(Envelope, ShortHistoryIsRejected) {
  const auto hist = daily_history(100, 60, [](int, int) { return 1.0; });
  EXPECT_THROW(bems::build_envelope(hist, GeoLocation{}, PlantConfig{}), bems::InsufficientHistory);
  EXPECT_THROW(bems::build_envelope({}, GeoLocation{}, PlantConfig{}), bems::InsufficientHistory);
}

TEST(Envelope, UncoveredDaysRaise) {
  const auto hist = daily_history(100, 61, [](int, int) { return 1.0; });
  const auto env = bems::build_envelope(hist, GeoLocation{}, PlantConfig{});
  EXPECT_NO_THROW(env.p_min(130, 12));
  EXPECT_THROW(env.p_min(300, 12), bems::InsufficientHistory);
}

TEST(Envelope, SpikesAreClampedToMaximum) {
  const auto hist = daily_history(1, 365, [](int, int) { return 50.0; });
  const auto env = bems::build_envelope(hist, GeoLocation{}, PlantConfig{});
  EXPECT_GT(env.clamped_samples(), 0);
  for (int d = 1; d <= 366; d += 11)
    for (int h = 0; h < 24; ++h) EXPECT_LE(env.p_min(d, h), env.p_max(d, h));
}

TEST(Envelope, BoundsHoldOnNoisyHistory) {
  const GeoLocation loc;
  const PlantConfig plant;
  const auto noisy = [&](int d, int h) {
    return bems::clear_sky_pv(loc, d, h, plant) * (0.2 + 0.9 * std::abs(std::sin(d * 12.9898 + h * 78.233)));
  };
  const auto env = bems::build_envelope(daily_history(1, 400, noisy), loc, plant);
  for (int d = 1; d <= 366; ++d)
    for (int h = 0; h < 24; ++h) {
      EXPECT_GE(env.p_min(d, h), 0.0);
      EXPECT_LE(env.p_min(d, h), env.p_max(d, h));
      EXPECT_LE(env.p_max(d, h), plant.p_pv_max);
    }
}

TEST(Envelope, ShiftByOneYearKeepsMaximum) {
  const GeoLocation loc;
  const PlantConfig plant;
  const auto f = [](int d, int h) { return 0.01 * d + 0.1 * h; };
  auto a = daily_history(1, 365, f);
  auto b = a;
  for (auto& s : b) s.day_index += 365;
  const auto ea = bems::build_envelope(a, loc, plant);
  const auto eb = bems::build_envelope(b, loc, plant);
  for (int d = 1; d <= 366; ++d)
    for (int h = 0; h < 24; ++h) {
      EXPECT_EQ(ea.p_max(d, h), eb.p_max(d, h));
      EXPECT_EQ(ea.p_min(d, h), eb.p_min(d, h));
    }
}

TEST(Envelope, DayDistanceWraps) {
  EXPECT_EQ(bems::day_of_year_distance(1, 365), 1);
  EXPECT_EQ(bems::day_of_year_distance(10, 350), 25);
  EXPECT_EQ(bems::day_of_year_distance(100, 100), 0);
}
