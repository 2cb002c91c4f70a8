#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bems/forecasting.hpp"

using bems::DayActuals;
using bems::ForecastSettings;
using bems::GeoLocation;
using bems::HourlyStats;
using bems::ProviderKind;

namespace {

constexpr int kJune21 = 172;

DayActuals sample_day(double scale) {
  DayActuals d;
  for (int h = 0; h < bems::kHoursPerDay; ++h) {
    d.pv[h] = scale * (1.0 + 0.2 * h);
    d.load[h] = scale * (0.5 + 0.1 * h);
  }
  return d;
}

HourlyStats unit_stats(double sigma) {
  HourlyStats s;
  s.mean.fill(1.0);
  s.sigma.fill(sigma);
  return s;
}

bool is_night(const GeoLocation& loc, int h) { return bems::solar_position(loc, kJune21, h).cos_zenith <= 0.0; }

}  // namespace

TEST(Forecast, OracleReturnsActuals) {
  const GeoLocation loc;
  const auto today = sample_day(1.0);
  std::mt19937_64 rng(3);
  const auto f = bems::forecast({ProviderKind::kOracle}, today, nullptr, unit_stats(1), unit_stats(1), loc, kJune21, rng);
  for (int h = 0; h < bems::kHoursPerDay; ++h) {
    EXPECT_EQ(f.dem_mean[h], today.load[h]);
    EXPECT_EQ(f.gen_mean[h], is_night(loc, h) ? 0.0 : today.pv[h]);
  }
}

TEST(Forecast, NoisyWithZeroAlphaIsOracle) {
  const GeoLocation loc;
  const auto today = sample_day(1.0);
  std::mt19937_64 a(3), b(3);
  const ForecastSettings noisy{ProviderKind::kNoisyOracle, 0.0, 0.0};
  const auto f = bems::forecast(noisy, today, nullptr, unit_stats(2), unit_stats(2), loc, kJune21, a);
  const auto g = bems::forecast({ProviderKind::kOracle}, today, nullptr, unit_stats(2), unit_stats(2), loc, kJune21, b);
  EXPECT_EQ(f.gen_mean, g.gen_mean);
  EXPECT_EQ(f.dem_mean, g.dem_mean);
}

TEST(Forecast, PersistenceReturnsYesterday) {
  const GeoLocation loc;
  const auto yesterday = sample_day(0.7), today = sample_day(1.0);
  std::mt19937_64 rng(3);
  const ForecastSettings s{ProviderKind::kPersistence};
  const auto f = bems::forecast(s, today, &yesterday, unit_stats(1), unit_stats(1), loc, kJune21, rng);
  for (int h = 0; h < bems::kHoursPerDay; ++h) {
    EXPECT_EQ(f.dem_mean[h], yesterday.load[h]);
    EXPECT_EQ(f.gen_mean[h], is_night(loc, h) ? 0.0 : yesterday.pv[h]);
  }
  EXPECT_THROW(bems::forecast(s, today, nullptr, unit_stats(1), unit_stats(1), loc, kJune21, rng), bems::DataError);
}

TEST(Forecast, NoisyIsNonNegativeAndNightPvIsZero) {
  const GeoLocation loc;
  const auto today = sample_day(0.05);
  const ForecastSettings s{ProviderKind::kNoisyOracle, 3.0, 3.0};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    const auto f = bems::forecast(s, today, nullptr, unit_stats(1), unit_stats(1), loc, kJune21, rng);
    for (int h = 0; h < bems::kHoursPerDay; ++h) {
      ASSERT_GE(f.gen_mean[h], 0.0);
      ASSERT_GE(f.dem_mean[h], 0.0);
      if (is_night(loc, h)) {
        ASSERT_EQ(f.gen_mean[h], 0.0);
      }
    }
  }
}

TEST(Forecast, NoisyIsDeterministicPerSeed) {
  const GeoLocation loc;
  const auto today = sample_day(1.0);
  std::mt19937_64 a(11), b(11);
  const ForecastSettings s;
  const auto f = bems::forecast(s, today, nullptr, unit_stats(1), unit_stats(1), loc, kJune21, a);
  const auto g = bems::forecast(s, today, nullptr, unit_stats(1), unit_stats(1), loc, kJune21, b);
  EXPECT_EQ(f.gen_mean, g.gen_mean);
  EXPECT_EQ(f.dem_mean, g.dem_mean);
}

TEST(Forecast, NoisyErrorSpreadMatchesAlphaSigma) {
  const GeoLocation loc;
  const auto today = sample_day(10.0);  // far from zero so clipping never bites
  HourlyStats gen = unit_stats(1.0), dem = unit_stats(1.0);
  for (int h = 0; h < bems::kHoursPerDay; ++h) {
    gen.sigma[h] = 0.5 + 0.1 * h;
    dem.sigma[h] = 1.5 - 0.03 * h;
  }
  const ForecastSettings s;  // alpha_gen 0.15, alpha_dem 0.35
  constexpr int kDraws = 10000;
  bems::HourlyArray<double> sg{}, sd{};
  for (int i = 0; i < kDraws; ++i) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(i));
    const auto f = bems::forecast(s, today, nullptr, gen, dem, loc, kJune21, rng);
    for (int h = 0; h < bems::kHoursPerDay; ++h) {
      sg[h] += std::pow(f.gen_mean[h] - today.pv[h], 2);
      sd[h] += std::pow(f.dem_mean[h] - today.load[h], 2);
    }
  }
  for (int h = 0; h < bems::kHoursPerDay; ++h) {
    EXPECT_NEAR(std::sqrt(sd[h] / kDraws), s.alpha_dem * dem.sigma[h], 0.05 * s.alpha_dem * dem.sigma[h]) << h;
    if (!is_night(loc, h)) {
      EXPECT_NEAR(std::sqrt(sg[h] / kDraws), s.alpha_gen * gen.sigma[h], 0.05 * s.alpha_gen * gen.sigma[h]) << h;
    }
  }
}

TEST(Forecast, ProviderNamesRoundTrip) {
  for (const auto k : {ProviderKind::kOracle, ProviderKind::kNoisyOracle, ProviderKind::kPersistence})
    EXPECT_EQ(bems::parse_provider(bems::to_string(k)), k);
  EXPECT_THROW(bems::parse_provider("LSTM"), std::invalid_argument);
  EXPECT_THROW(ForecastSettings({ProviderKind::kOracle, -1.0, 0.0}).validate(), std::invalid_argument);
}
