#pragma once

// Per-hour discrete distributions over power bins: forecast-driven truncated
// Gaussians, empirical histograms from history, and their convex combination.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bems/errors.hpp"
#include "bems/plant.hpp"
#include "bems/solar_model.hpp"

namespace bems {

inline constexpr int kDefaultBins = 100;
inline constexpr double kColumnSumTol = 1e-9;

struct RangeSpec {
  double lo = 0.0;
  double hi = 1.0;
  int bins = kDefaultBins;

  void validate() const {
    if (!(lo < hi)) throw std::invalid_argument("range requires lo < hi");
    if (bins < 2) throw std::invalid_argument("range requires at least 2 bins");
  }
  double width() const { return (hi - lo) / bins; }
};

// Power interval covered by one hour's column. lo == hi marks a degenerate
// (night) column whose only representative value is lo.
struct BinRange {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const BinRange&) const = default;
};

enum class MatrixKind { kForecast, kHistorical, kTotal };
enum class Quantity { kGeneration, kDemand };

inline const char* to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::kForecast: return "forecast";
    case MatrixKind::kHistorical: return "historical";
    case MatrixKind::kTotal: return "total";
  }
  return "?";
}
inline const char* to_string(Quantity q) { return q == Quantity::kGeneration ? "generation" : "demand"; }

// R x 24 column-stochastic matrix; column h is the distribution for hour h.
class ProbabilityMatrix {
 public:
  ProbabilityMatrix(int bins, MatrixKind kind, Quantity quantity, const HourlyArray<BinRange>& ranges)
      : bins_(bins), kind_(kind), quantity_(quantity), ranges_(ranges),
        values_(static_cast<std::size_t>(bins) * kHoursPerDay, 0.0) {
    if (bins < 2) throw std::invalid_argument("probability matrix needs at least 2 bins");
    for (const auto& r : ranges_)
      if (!(r.lo <= r.hi)) throw std::invalid_argument("bin range requires lo <= hi");
  }

  ProbabilityMatrix(MatrixKind kind, Quantity quantity, const RangeSpec& range)
      : ProbabilityMatrix(range.bins, kind, quantity, uniform_ranges(range)) {
    range.validate();
  }

  static HourlyArray<BinRange> uniform_ranges(const RangeSpec& r) {
    HourlyArray<BinRange> out;
    out.fill({r.lo, r.hi});
    return out;
  }

  int bins() const { return bins_; }
  MatrixKind kind() const { return kind_; }
  Quantity quantity() const { return quantity_; }
  const HourlyArray<BinRange>& ranges() const { return ranges_; }
  const BinRange& range(int hour) const { return ranges_.at(static_cast<std::size_t>(hour)); }

  double at(int bin, int hour) const { return values_[offset(bin, hour)]; }
  double& at(int bin, int hour) { return values_[offset(bin, hour)]; }
  std::span<const double> column(int hour) const {
    return {values_.data() + offset(0, hour), static_cast<std::size_t>(bins_)};
  }
  std::span<double> column(int hour) {
    return {values_.data() + offset(0, hour), static_cast<std::size_t>(bins_)};
  }

  double bin_width(int hour) const { return (range(hour).hi - range(hour).lo) / bins_; }
  bool degenerate(int hour) const { return !(range(hour).hi > range(hour).lo); }

  double midpoint(int bin, int hour) const {
    if (degenerate(hour)) return range(hour).lo;
    return range(hour).lo + (bin + 0.5) * bin_width(hour);
  }

  // clamp(floor((x - lo) / width), 0, R - 1)
  int bin_of(int hour, double x) const {
    if (degenerate(hour)) return 0;
    const double k = std::floor((x - range(hour).lo) / bin_width(hour));
    return static_cast<int>(std::clamp(k, 0.0, static_cast<double>(bins_ - 1)));
  }

  double column_sum(int hour) const {
    double s = 0.0;
    for (const double p : column(hour)) s += p;
    return s;
  }
  double column_mean(int hour) const {
    double m = 0.0;
    for (int k = 0; k < bins_; ++k) m += at(k, hour) * midpoint(k, hour);
    return m;
  }
  double column_stddev(int hour) const {
    const double mu = column_mean(hour);
    double v = 0.0;
    for (int k = 0; k < bins_; ++k) v += at(k, hour) * (midpoint(k, hour) - mu) * (midpoint(k, hour) - mu);
    return std::sqrt(v);
  }

  void set_point_mass(int hour, int bin) {
    auto col = column(hour);
    std::fill(col.begin(), col.end(), 0.0);
    col[static_cast<std::size_t>(bin)] = 1.0;
  }

  // Throws unless every column is non-negative and sums to 1 within 1e-9.
  void validate() const {
    for (int h = 0; h < kHoursPerDay; ++h) {
      for (const double p : column(h))
        if (!(p >= 0.0)) throw std::domain_error("negative probability in column " + std::to_string(h));
      if (std::abs(column_sum(h) - 1.0) > kColumnSumTol)
        throw std::domain_error("column " + std::to_string(h) + " does not sum to 1");
    }
  }

  void set_kind(MatrixKind k) { kind_ = k; }

 private:
  std::size_t offset(int bin, int hour) const {
    if (bin < 0 || bin >= bins_ || hour < 0 || hour >= kHoursPerDay)
      throw std::out_of_range("probability matrix index out of range");
    return static_cast<std::size_t>(hour) * static_cast<std::size_t>(bins_) + static_cast<std::size_t>(bin);
  }

  int bins_;
  MatrixKind kind_;
  Quantity quantity_;
  HourlyArray<BinRange> ranges_;
  std::vector<double> values_;
};

struct HourlySample {
  int hour;
  double kw;
};

struct HourlyStats {
  HourlyArray<double> mean{};
  HourlyArray<double> sigma{};
};

// Sample mean and sample standard deviation per hour of day, sigma floored.
inline HourlyStats hourly_stats(std::span<const HourlySample> history, double sigma_floor) {
  HourlyArray<double> sum{}, sum_sq{};
  HourlyArray<int> count{};
  for (const auto& s : history) {
    if (s.hour < 0 || s.hour >= kHoursPerDay) throw std::invalid_argument("sample hour out of range");
    sum[s.hour] += s.kw;
    ++count[s.hour];
  }
  HourlyStats stats;
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (count[h] < 2)
      throw InsufficientHistory("hour " + std::to_string(h) + " has fewer than 2 samples");
    stats.mean[h] = sum[h] / count[h];
  }
  for (const auto& s : history) sum_sq[s.hour] += (s.kw - stats.mean[s.hour]) * (s.kw - stats.mean[s.hour]);
  for (int h = 0; h < kHoursPerDay; ++h)
    stats.sigma[h] = std::max(std::sqrt(sum_sq[h] / (count[h] - 1)), sigma_floor);
  return stats;
}

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Truncated Gaussian per hour: mean = forecast (clamped into the hour's
// range), sigma = max(stats.sigma, one bin width), mass per bin from CDF
// differences, renormalised over the range.
inline ProbabilityMatrix forecast_matrix(const HourlyArray<double>& forecast, const HourlyStats& stats,
                                         const HourlyArray<BinRange>& ranges, int bins, Quantity quantity) {
  ProbabilityMatrix m(bins, MatrixKind::kForecast, quantity, ranges);
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (m.degenerate(h)) {
      m.set_point_mass(h, 0);
      continue;
    }
    const auto& r = m.range(h);
    const double w = m.bin_width(h);
    const double mu = std::clamp(forecast[h], r.lo, r.hi);
    const double sigma = std::max(stats.sigma[h], w);
    auto col = m.column(h);
    double total = 0.0;
    double prev = standard_normal_cdf((r.lo - mu) / sigma);
    for (int k = 0; k < bins; ++k) {
      const double edge = k + 1 == bins ? r.hi : r.lo + (k + 1) * w;
      const double cur = standard_normal_cdf((edge - mu) / sigma);
      col[static_cast<std::size_t>(k)] = std::max(0.0, cur - prev);
      total += col[static_cast<std::size_t>(k)];
      prev = cur;
    }
    for (auto& p : col) p /= total;
  }
  return m;
}

inline ProbabilityMatrix forecast_matrix(const HourlyArray<double>& forecast, const HourlyStats& stats,
                                         const RangeSpec& range, Quantity quantity) {
  range.validate();
  return forecast_matrix(forecast, stats, ProbabilityMatrix::uniform_ranges(range), range.bins, quantity);
}

// Normalise columns of raw counts; columns without samples become uniform.
namespace detail {
inline void normalise_counts(ProbabilityMatrix& m, const HourlyArray<double>& totals, bool empty_is_point_mass) {
  for (int h = 0; h < kHoursPerDay; ++h) {
    auto col = m.column(h);
    if (totals[h] <= 0.0) {
      if (empty_is_point_mass) m.set_point_mass(h, 0);
      else std::fill(col.begin(), col.end(), 1.0 / m.bins());
      continue;
    }
    for (auto& p : col) p /= totals[h];
  }
}
}  // namespace detail

inline ProbabilityMatrix historical_demand_matrix(std::span<const HourlySample> history, const RangeSpec& range) {
  range.validate();
  if (history.empty()) throw DataError("historical demand matrix needs a non-empty history");
  ProbabilityMatrix m(MatrixKind::kHistorical, Quantity::kDemand, range);
  HourlyArray<double> totals{};
  for (const auto& s : history) {
    m.at(m.bin_of(s.hour, s.kw), s.hour) += 1.0;
    totals[s.hour] += 1.0;
  }
  detail::normalise_counts(m, totals, false);
  return m;
}

// Seasonality-free class of a PV observation relative to its envelope.
inline int pv_class(double x, double p_min, double p_max, int bins) {
  if (!(p_max - p_min > kNightThresholdKw)) return x >= p_max ? bins - 1 : 0;
  const double k = std::floor(bins * (x - p_min) / (p_max - p_min));
  return static_cast<int>(std::clamp(k, 0.0, static_cast<double>(bins - 1)));
}

// Class-membership matrix on the relative range [0, 1]; night samples are
// skipped and hours that are never daylight become a point mass at class 0.
inline ProbabilityMatrix historical_pv_matrix(std::span<const PvSample> history, const PvEnvelope& env, int bins) {
  HourlyArray<BinRange> unit;
  unit.fill({0.0, 1.0});
  ProbabilityMatrix m(bins, MatrixKind::kHistorical, Quantity::kGeneration, unit);
  HourlyArray<double> totals{};
  for (const auto& s : history) {
    if (env.is_night(s.day_of_year, s.hour)) continue;
    const double p_max = env.p_max(s.day_of_year, s.hour);
    const double p_min = env.p_min(s.day_of_year, s.hour);
    m.at(pv_class(std::min(s.kw, p_max), p_min, p_max, bins), s.hour) += 1.0;
    totals[s.hour] += 1.0;
  }
  detail::normalise_counts(m, totals, true);
  return m;
}

// Per-hour generation ranges [p_min, p_max] for a given day; night hours collapse to [0, 0].
inline HourlyArray<BinRange> pv_ranges_for_day(const PvEnvelope& env, int day_of_year) {
  HourlyArray<BinRange> r;
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (env.is_night(day_of_year, h)) r[h] = {0.0, 0.0};
    else r[h] = {env.p_min(day_of_year, h), env.p_max(day_of_year, h)};
  }
  return r;
}

// Re-express a relative class matrix on the absolute ranges of one day.
inline ProbabilityMatrix anchor_pv_matrix(const ProbabilityMatrix& classes, const PvEnvelope& env, int day_of_year) {
  const auto ranges = pv_ranges_for_day(env, day_of_year);
  ProbabilityMatrix m(classes.bins(), classes.kind(), Quantity::kGeneration, ranges);
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (m.degenerate(h)) {
      m.set_point_mass(h, 0);
      continue;
    }
    auto dst = m.column(h);
    const auto src = classes.column(h);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return m;
}

// weight * f + (1 - weight) * h, elementwise.
inline ProbabilityMatrix combine(const ProbabilityMatrix& f, const ProbabilityMatrix& h, double weight = 0.5) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw std::invalid_argument("combination weight outside [0, 1]");
  if (f.bins() != h.bins() || f.quantity() != h.quantity())
    throw ShapeMismatch("combined matrices differ in bins or quantity");
  for (int hr = 0; hr < kHoursPerDay; ++hr) {
    const auto& a = f.range(hr);
    const auto& b = h.range(hr);
    if (std::abs(a.lo - b.lo) > 1e-12 || std::abs(a.hi - b.hi) > 1e-12)
      throw ShapeMismatch("combined matrices differ in range at hour " + std::to_string(hr));
  }
  ProbabilityMatrix out(f.bins(), MatrixKind::kTotal, f.quantity(), f.ranges());
  for (int hr = 0; hr < kHoursPerDay; ++hr)
    for (int k = 0; k < f.bins(); ++k) out.at(k, hr) = weight * f.at(k, hr) + (1.0 - weight) * h.at(k, hr);
  return out;
}

// Everything derived once from the historical record and reused every day.
struct HistoricalModel {
  GeoLocation location;
  PvEnvelope envelope;
  ProbabilityMatrix pv_classes;  // relative to the envelope
  ProbabilityMatrix demand;
  HourlyStats gen_stats;
  HourlyStats dem_stats;
  RangeSpec dem_range;
};

// Demand range is [0, headroom * max(history)].
inline HistoricalModel build_historical_model(std::span<const PvSample> pv, std::span<const HourlySample> demand,
                                              const GeoLocation& loc, const PlantConfig& plant, int bins = kDefaultBins,
                                              double demand_headroom = 1.1) {
  if (demand.empty()) throw InsufficientHistory("no demand history");
  double peak = 0.0;
  for (const auto& s : demand) peak = std::max(peak, s.kw);
  const RangeSpec dem_range{0.0, peak > 0.0 ? demand_headroom * peak : 1.0, bins};
  auto env = build_envelope(pv, loc, plant);
  auto classes = historical_pv_matrix(pv, env, bins);
  std::vector<HourlySample> pv_hourly;
  pv_hourly.reserve(pv.size());
  for (const auto& s : pv) pv_hourly.push_back({s.hour, std::min(s.kw, env.p_max(s.day_of_year, s.hour))});
  return {loc,
          std::move(env),
          std::move(classes),
          historical_demand_matrix(demand, dem_range),
          hourly_stats(pv_hourly, 0.0),
          hourly_stats(demand, dem_range.width()),
          dem_range};
}

}  // namespace bems
