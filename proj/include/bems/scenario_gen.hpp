#pragma once

// Stratified inverse-CDF sampling of paired generation/demand day profiles,
// scenario scoring and top-k selection.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bems/plant.hpp"
#include "bems/prob_model.hpp"
#include "bems/solar_model.hpp"

namespace bems {

inline constexpr int kDefaultScenarioCount = 100;
inline constexpr int kDefaultSelected = 10;

struct HourCdf {
  std::vector<double> edges;  // R + 1 values, edges[0] = 0, edges[R] = 1
  BinRange range;

  int bins() const { return static_cast<int>(edges.size()) - 1; }
  double midpoint(int bin) const {
    if (!(range.hi > range.lo)) return range.lo;
    // Same operation order as ProbabilityMatrix::midpoint, so both agree bitwise.
    return range.lo + (bin + 0.5) * ((range.hi - range.lo) / bins());
  }
};

inline HourCdf build_cdf(std::span<const double> column, const BinRange& range) {
  if (column.size() < 2) throw std::invalid_argument("CDF needs at least 2 bins");
  HourCdf cdf{std::vector<double>(column.size() + 1, 0.0), range};
  double acc = 0.0;
  for (std::size_t k = 0; k < column.size(); ++k) {
    if (!(column[k] >= 0.0)) throw std::domain_error("negative probability in CDF column");
    acc += column[k];
    cdf.edges[k + 1] = acc;
  }
  if (std::abs(acc - 1.0) > kColumnSumTol) throw std::domain_error("CDF column does not sum to 1");
  cdf.edges.back() = 1.0;
  return cdf;
}

inline HourCdf build_cdf(const ProbabilityMatrix& m, int hour) { return build_cdf(m.column(hour), m.range(hour)); }

// Bin whose CDF interval contains u: first bin with upper edge >= u and positive mass.
inline int invert_cdf(const HourCdf& cdf, double u) {
  const auto it = std::lower_bound(cdf.edges.begin() + 1, cdf.edges.end(), u);
  int k = it == cdf.edges.end() ? cdf.bins() - 1 : static_cast<int>(it - cdf.edges.begin()) - 1;
  while (k + 1 < cdf.bins() && !(cdf.edges[k + 1] > cdf.edges[k])) ++k;
  return k;
}

// One draw per equal-probability stratum ((s-1)/S, s/S], mapped to bin midpoints.
template <class Rng>
std::vector<double> sample_stratified(const HourCdf& cdf, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("stratified sampling needs S >= 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    const double u = (s + unit(rng)) / count;
    out[static_cast<std::size_t>(s)] = cdf.midpoint(invert_cdf(cdf, u));
  }
  return out;
}

struct Scenario {
  int id = 0;  // 1-based stratum index in the generated set
  HourlyArray<double> gen{};
  HourlyArray<double> dem{};
  double prob = 0.0;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;

  int size() const { return static_cast<int>(scenarios.size()); }
  double total_probability() const {
    double s = 0.0;
    for (const auto& sc : scenarios) s += sc.prob;
    return s;
  }
  // Probability-weighted mean profile.
  HourlyArray<double> expected_gen() const { return expected(&Scenario::gen); }
  HourlyArray<double> expected_dem() const { return expected(&Scenario::dem); }

 private:
  HourlyArray<double> expected(HourlyArray<double> Scenario::*field) const {
    HourlyArray<double> out{};
    for (const auto& sc : scenarios)
      for (int h = 0; h < kHoursPerDay; ++h) out[h] += sc.prob * (sc.*field)[h];
    return out;
  }
};

struct ScenarioOptions {
  int count = kDefaultScenarioCount;
  // Assign strata independently per hour instead of holding them fixed.
  bool shuffle_strata = false;
};

template <class Rng>
ScenarioSet generate(const ProbabilityMatrix& gen, const ProbabilityMatrix& dem, const ScenarioOptions& opts, Rng& rng) {
  if (gen.quantity() != Quantity::kGeneration || dem.quantity() != Quantity::kDemand)
    throw std::invalid_argument("generate expects a generation and a demand matrix");
  if (opts.count < 1) throw std::invalid_argument("scenario count must be >= 1");
  ScenarioSet set;
  set.scenarios.resize(static_cast<std::size_t>(opts.count));
  for (int s = 0; s < opts.count; ++s) set.scenarios[static_cast<std::size_t>(s)].id = s + 1;
  std::vector<int> gen_order(static_cast<std::size_t>(opts.count)), dem_order(gen_order.size());
  for (int h = 0; h < kHoursPerDay; ++h) {
    const auto g = sample_stratified(build_cdf(gen, h), opts.count, rng);
    const auto d = sample_stratified(build_cdf(dem, h), opts.count, rng);
    std::iota(gen_order.begin(), gen_order.end(), 0);
    std::iota(dem_order.begin(), dem_order.end(), 0);
    if (opts.shuffle_strata) {
      std::shuffle(gen_order.begin(), gen_order.end(), rng);
      std::shuffle(dem_order.begin(), dem_order.end(), rng);
    }
    for (std::size_t s = 0; s < gen_order.size(); ++s) {
      set.scenarios[s].gen[h] = g[static_cast<std::size_t>(gen_order[s])];
      set.scenarios[s].dem[h] = d[static_cast<std::size_t>(dem_order[s])];
    }
  }
  return set;
}

template <class Rng>
ScenarioSet generate(const ProbabilityMatrix& gen, const ProbabilityMatrix& dem, int count, Rng& rng) {
  return generate(gen, dem, ScenarioOptions{count, false}, rng);
}

// Scenario probability = mean over hours of p_gen(bin(g)) * p_dem(bin(d)).
inline double scenario_probability(const Scenario& sc, const ProbabilityMatrix& gen, const ProbabilityMatrix& dem) {
  double acc = 0.0;
  for (int h = 0; h < kHoursPerDay; ++h)
    acc += gen.at(gen.bin_of(h, sc.gen[h]), h) * dem.at(dem.bin_of(h, sc.dem[h]), h);
  return acc / kHoursPerDay;
}

inline void score(ScenarioSet& set, const ProbabilityMatrix& gen, const ProbabilityMatrix& dem) {
  for (auto& sc : set.scenarios) sc.prob = scenario_probability(sc, gen, dem);
}

// Keep the `keep` most probable scenarios (ties to the lower id) and renormalise.
// If every kept score is zero the kept scenarios are weighted equally.
inline ScenarioSet select_top(const ScenarioSet& set, int keep = kDefaultSelected) {
  if (keep < 1 || keep > set.size()) throw std::invalid_argument("select_top needs 1 <= keep <= S");
  ScenarioSet out = set;
  std::stable_sort(out.scenarios.begin(), out.scenarios.end(), [](const Scenario& a, const Scenario& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.id < b.id;
  });
  out.scenarios.resize(static_cast<std::size_t>(keep));
  const double total = out.total_probability();
  for (auto& sc : out.scenarios) sc.prob = total > 0.0 ? sc.prob / total : 1.0 / keep;
  return out;
}

inline ScenarioSet apply_night_mask(ScenarioSet set, const GeoLocation& loc, int day_of_year) {
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (solar_position(loc, day_of_year, h).cos_zenith > 0.0) continue;
    for (auto& sc : set.scenarios) sc.gen[h] = 0.0;
  }
  return set;
}

}  // namespace bems
