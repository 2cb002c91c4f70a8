#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bems {

inline constexpr int kHoursPerDay = 24;

template <class T>
using HourlyArray = std::array<T, kHoursPerDay>;

struct GeoLocation {
  double latitude = 51.5;    // degrees
  double longitude = -0.13;  // degrees

  void validate() const {
    if (!(latitude >= -90.0 && latitude <= 90.0))
      throw std::invalid_argument("latitude outside [-90, 90]");
    if (!(longitude >= -180.0 && longitude <= 180.0))
      throw std::invalid_argument("longitude outside [-180, 180]");
  }
};

// Building network characteristics. Defaults follow the reference building:
// 10 kWp PV on a 12 kW inverter, 10 kWh / 5 kW battery, 5 kW grid converter,
// SoC window 15-90 %.
struct PlantConfig {
  double p_pv_max = 12.0;  // kW, PV inverter
  double p_es_max = 5.0;   // kW, battery inverter
  double p_gr_max = 5.0;   // kW, grid converter
  double e_cap = 10.0;     // kWh
  double soc_min = 15.0;   // %
  double soc_max = 90.0;   // %
  double soc_init = 50.0;  // %
  double eta_c = 0.95;
  double eta_d = 0.95;
  double delta_t = 1.0;         // h
  double pv_stc = 10.0;         // kWp
  double pv_derate = 0.85;
  double shed_penalty = 10.0;   // EUR/kWh of unserved load
  double curtail_penalty = 0.0; // EUR/kWh of spilled PV in the planner
  bool terminal_soc = false;    // require end-of-day SoC >= start SoC

  void validate() const {
    if (!(p_pv_max > 0 && p_es_max > 0 && p_gr_max > 0 && e_cap > 0 && pv_stc > 0 && delta_t > 0))
      throw std::invalid_argument("plant power and energy limits must be positive");
    if (!(soc_min >= 0 && soc_min < soc_max && soc_max <= 100))
      throw std::invalid_argument("plant SoC window must satisfy 0 <= min < max <= 100");
    if (!(soc_init >= soc_min && soc_init <= soc_max))
      throw std::invalid_argument("initial SoC outside the SoC window");
    if (!(eta_c > 0 && eta_c <= 1 && eta_d > 0 && eta_d <= 1))
      throw std::invalid_argument("efficiencies must lie in (0, 1]");
    if (!(pv_derate > 0 && pv_derate <= 1)) throw std::invalid_argument("derate must lie in (0, 1]");
    if (!(shed_penalty >= 0 && curtail_penalty >= 0))
      throw std::invalid_argument("penalties must be non-negative");
  }

  // kW that can still be charged in one step before hitting soc_max.
  double charge_headroom_kw(double soc) const {
    return std::max(0.0, (soc_max - soc) * e_cap / (100.0 * eta_c * delta_t));
  }
  // kW deliverable in one step before hitting soc_min.
  double discharge_available_kw(double soc) const {
    return std::max(0.0, (soc - soc_min) * e_cap * eta_d / (100.0 * delta_t));
  }
  double next_soc(double soc, double charge_kw, double discharge_kw) const {
    return soc + 100.0 * delta_t * (eta_c * charge_kw - discharge_kw / eta_d) / e_cap;
  }
};

// Power flows of one hour, kW. Curtailed PV and shed load are explicit slacks.
struct PowerFlows {
  double pv_ld = 0.0;
  double pv_es = 0.0;
  double pv_gr = 0.0;
  double gr_ld = 0.0;
  double gr_es = 0.0;
  double es_ld = 0.0;
  double es_gr = 0.0;
  double curtail = 0.0;
  double shed = 0.0;

  double grid_import() const { return gr_ld + gr_es; }
  double grid_export() const { return pv_gr + es_gr; }
  double charge() const { return pv_es + gr_es; }
  double discharge() const { return es_ld + es_gr; }
  double pv_used() const { return pv_ld + pv_es + pv_gr; }
  double load_served() const { return pv_ld + gr_ld + es_ld; }
};

// Time-of-use prices for one day, EUR/kWh.
struct TariffDay {
  HourlyArray<double> tou_imp{};
  HourlyArray<double> tou_exp{};

  void validate() const {
    for (int h = 0; h < kHoursPerDay; ++h) {
      if (!std::isfinite(tou_imp[h]) || !std::isfinite(tou_exp[h]) || tou_imp[h] < 0 || tou_exp[h] < 0)
        throw std::invalid_argument("tariff at hour " + std::to_string(h) + " must be finite and >= 0");
    }
  }
};

}  // namespace bems
