#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bems/dispatch_opt.hpp"

namespace oracle {

// Cheapest recourse for one scenario-hour given the battery's charge c or
// discharge d. Returns +inf when no routing exists.
inline double recourse_cost(double pv, double load, double c, double d, double pi, double pe,
                            const bems::PlantConfig& pl) {
  pv = std::min(pv, pl.p_pv_max);
  const double need = load + c - pv - d;
  const double dt = pl.delta_t;
  if (need >= 0.0) {
    // PV must reach the load or the battery before anything is bought.
    const double imp = std::min(need, pl.p_gr_max);
    const double shed = need - imp;
    if (shed > load + 1e-12) return std::numeric_limits<double>::infinity();
    return dt * (imp * pi + shed * pl.shed_penalty);
  }
  const double surplus = -need;
  const double exp = std::min(surplus, pl.p_gr_max);
  const double curtail = surplus - exp;
  const double curtailable = pv - c - std::max(0.0, load - d);
  if (curtail > curtailable + 1e-12) return std::numeric_limits<double>::infinity();
  return dt * (-exp * pe + curtail * pl.curtail_penalty);
}

struct GridResult {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<double> u;
};

// Exhaustive search over u[h] on a step grid in [-p_es_max, p_es_max].
inline GridResult grid_search(const bems::DispatchProblem& p, double step) {
  const auto& pl = p.plant;
  const int H = p.horizon();
  const int n = static_cast<int>(std::lround(pl.p_es_max / step));
  std::vector<int> idx(static_cast<std::size_t>(H), -n);
  GridResult best;
  std::vector<double> u(static_cast<std::size_t>(H));
  while (true) {
    double soc = p.soc0;
    double cost = 0.0;
    bool ok = true;
    for (int h = 0; h < H && ok; ++h) {
      u[h] = idx[h] * step;
      const double c = std::max(u[h], 0.0), d = std::max(-u[h], 0.0);
      soc = pl.next_soc(soc, c, d);
      if (soc < pl.soc_min - 1e-9 || soc > pl.soc_max + 1e-9) ok = false;
      for (const auto& s : p.scenarios) {
        if (!ok) break;
        const double r = recourse_cost(s.gen[h], s.dem[h], c, d, p.tou_imp[h], p.tou_exp[h], pl);
        if (!std::isfinite(r)) ok = false;
        cost += s.prob * r;
      }
    }
    if (ok && cost < best.cost) {
      best.cost = cost;
      best.u = u;
    }
    int k = 0;
    while (k < H && idx[k] == n) idx[k++] = -n;
    if (k == H) break;
    ++idx[k];
  }
  return best;
}

}  // namespace oracle
