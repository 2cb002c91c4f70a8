#pragma once

// Probability-weighted multi-scenario day-ahead dispatch. The battery net
// power u[h] is shared by all scenarios; grid exchange and PV routing are
// per-scenario recourse.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bems/errors.hpp"
#include "bems/milp_solver.hpp"
#include "bems/plant.hpp"
#include "bems/scenario_gen.hpp"

namespace bems {

struct DispatchScenario {
  std::vector<double> gen;  // kW per hour
  std::vector<double> dem;  // kW per hour
  double prob = 1.0;
};

// Horizon-generic planning problem; a day uses horizon 24.
struct DispatchProblem {
  std::vector<DispatchScenario> scenarios;
  std::vector<double> tou_imp;
  std::vector<double> tou_exp;
  PlantConfig plant;
  double soc0 = 50.0;

  int horizon() const { return static_cast<int>(tou_imp.size()); }

  void validate() const {
    plant.validate();
    if (scenarios.empty()) throw std::invalid_argument("dispatch needs at least one scenario");
    const auto h = tou_imp.size();
    if (h == 0 || tou_exp.size() != h) throw std::invalid_argument("tariff horizon mismatch");
    double total = 0.0;
    for (const auto& s : scenarios) {
      if (s.gen.size() != h || s.dem.size() != h) throw std::invalid_argument("scenario horizon mismatch");
      if (!(s.prob >= 0.0)) throw std::invalid_argument("scenario probability must be >= 0");
      for (std::size_t t = 0; t < h; ++t)
        if (!(s.gen[t] >= 0.0 && s.dem[t] >= 0.0)) throw std::invalid_argument("scenario power must be >= 0");
      total += s.prob;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("scenario probabilities must sum to 1");
    for (std::size_t t = 0; t < h; ++t)
      if (!std::isfinite(tou_imp[t]) || !std::isfinite(tou_exp[t]) || tou_imp[t] < 0 || tou_exp[t] < 0)
        throw std::invalid_argument("tariffs must be finite and >= 0");
    if (!(soc0 >= plant.soc_min - 1e-9 && soc0 <= plant.soc_max + 1e-9))
      throw std::invalid_argument("initial SoC outside the SoC window");
  }
};

inline DispatchProblem make_problem(const ScenarioSet& set, const TariffDay& tariffs, const PlantConfig& plant,
                                    double soc0) {
  DispatchProblem p;
  p.tou_imp.assign(tariffs.tou_imp.begin(), tariffs.tou_imp.end());
  p.tou_exp.assign(tariffs.tou_exp.begin(), tariffs.tou_exp.end());
  p.plant = plant;
  p.soc0 = soc0;
  for (const auto& sc : set.scenarios)
    p.scenarios.push_back({{sc.gen.begin(), sc.gen.end()}, {sc.dem.begin(), sc.dem.end()}, sc.prob});
  return p;
}

// Column indices of one scenario-hour.
struct HourVars {
  int pv_ld, pv_es, pv_gr, gr_ld, gr_es, es_ld, es_gr, curtail, shed, soc;
  int import_on, export_on, charge_on, discharge_on;
};

struct DispatchModel {
  LinearProgram lp;
  std::vector<int> u;                       // per hour
  std::vector<std::vector<HourVars>> vars;  // [scenario][hour]
};

namespace detail {
inline std::string tag(const char* what, std::size_t i, int h) {
  return std::string(what) + "_s" + std::to_string(i + 1) + "_h" + std::to_string(h);
}
}  // namespace detail

inline DispatchModel build_model(const DispatchProblem& prob) {
  prob.validate();
  const PlantConfig& pl = prob.plant;
  const int horizon = prob.horizon();
  const double dt = pl.delta_t;
  DispatchModel m;
  auto& lp = m.lp;
  for (int h = 0; h < horizon; ++h)
    m.u.push_back(lp.add_variable(-pl.p_es_max, pl.p_es_max, 0.0, "u_h" + std::to_string(h)));

  m.vars.resize(prob.scenarios.size());
  for (std::size_t i = 0; i < prob.scenarios.size(); ++i) {
    const auto& sc = prob.scenarios[i];
    const double w = sc.prob;
    for (int h = 0; h < horizon; ++h) {
      const double pv = std::min(sc.gen[static_cast<std::size_t>(h)], pl.p_pv_max);
      const double load = sc.dem[static_cast<std::size_t>(h)];
      const double imp_cost = w * dt * prob.tou_imp[static_cast<std::size_t>(h)];
      const double exp_cost = -w * dt * prob.tou_exp[static_cast<std::size_t>(h)];
      HourVars v{};
      v.pv_ld = lp.add_variable(0, kInfinity, 0.0, detail::tag("pv_ld", i, h));
      v.pv_es = lp.add_variable(0, kInfinity, 0.0, detail::tag("pv_es", i, h));
      v.pv_gr = lp.add_variable(0, kInfinity, exp_cost, detail::tag("pv_gr", i, h));
      v.gr_ld = lp.add_variable(0, kInfinity, imp_cost, detail::tag("gr_ld", i, h));
      v.gr_es = lp.add_variable(0, kInfinity, imp_cost, detail::tag("gr_es", i, h));
      v.es_ld = lp.add_variable(0, kInfinity, 0.0, detail::tag("es_ld", i, h));
      v.es_gr = lp.add_variable(0, kInfinity, exp_cost, detail::tag("es_gr", i, h));
      v.curtail = lp.add_variable(0, pv, w * dt * pl.curtail_penalty, detail::tag("curtail", i, h));
      v.shed = lp.add_variable(0, load, w * dt * pl.shed_penalty, detail::tag("shed", i, h));
      v.soc = lp.add_variable(pl.soc_min, pl.soc_max, 0.0, detail::tag("soc", i, h));
      v.import_on = lp.add_binary(0.0, detail::tag("imp_on", i, h));
      v.export_on = lp.add_binary(0.0, detail::tag("exp_on", i, h));
      v.charge_on = lp.add_binary(0.0, detail::tag("chg_on", i, h));
      v.discharge_on = lp.add_binary(0.0, detail::tag("dis_on", i, h));

      lp.add_constraint({{v.pv_ld, 1}, {v.pv_es, 1}, {v.pv_gr, 1}}, Relation::kLessEqual, pl.p_pv_max,
                        detail::tag("pv_cap", i, h));
      lp.add_constraint({{v.gr_ld, 1}, {v.gr_es, 1}}, Relation::kLessEqual, pl.p_gr_max, detail::tag("grid_cap", i, h));
      lp.add_constraint({{v.es_ld, 1}, {v.es_gr, 1}}, Relation::kLessEqual, pl.p_es_max, detail::tag("dis_cap", i, h));
      lp.add_constraint({{v.pv_es, 1}, {v.gr_es, 1}}, Relation::kLessEqual, pl.p_es_max, detail::tag("chg_cap", i, h));
      lp.add_constraint({{v.pv_ld, 1}, {v.pv_es, 1}, {v.pv_gr, 1}, {v.curtail, 1}}, Relation::kEqual, pv,
                        detail::tag("pv_bal", i, h));
      lp.add_constraint({{v.pv_ld, 1}, {v.gr_ld, 1}, {v.es_ld, 1}, {v.shed, 1}}, Relation::kEqual, load,
                        detail::tag("load_bal", i, h));
      // soc[h] - soc[h-1] - k_c (pv_es + gr_es) + k_d (es_ld + es_gr) = 0, soc[-1] = soc0
      const double kc = 100.0 * dt * pl.eta_c / pl.e_cap;
      const double kd = 100.0 * dt / (pl.eta_d * pl.e_cap);
      std::vector<Term> dyn{{v.soc, 1}, {v.pv_es, -kc}, {v.gr_es, -kc}, {v.es_ld, kd}, {v.es_gr, kd}};
      double rhs = prob.soc0;
      if (h > 0) {
        dyn.push_back({m.vars[i][static_cast<std::size_t>(h - 1)].soc, -1});
        rhs = 0.0;
      }
      lp.add_constraint(std::move(dyn), Relation::kEqual, rhs, detail::tag("soc_dyn", i, h));

      lp.add_constraint({{v.gr_ld, 1}, {v.gr_es, 1}, {v.import_on, -pl.p_gr_max}}, Relation::kLessEqual, 0,
                        detail::tag("imp_gate", i, h));
      lp.add_constraint({{v.pv_gr, 1}, {v.es_gr, 1}, {v.export_on, -pl.p_gr_max}}, Relation::kLessEqual, 0,
                        detail::tag("exp_gate", i, h));
      lp.add_constraint({{v.import_on, 1}, {v.export_on, 1}}, Relation::kLessEqual, 1, detail::tag("grid_excl", i, h));
      lp.add_constraint({{v.pv_es, 1}, {v.gr_es, 1}, {v.charge_on, -pl.p_es_max}}, Relation::kLessEqual, 0,
                        detail::tag("chg_gate", i, h));
      lp.add_constraint({{v.es_ld, 1}, {v.es_gr, 1}, {v.discharge_on, -pl.p_es_max}}, Relation::kLessEqual, 0,
                        detail::tag("dis_gate", i, h));
      lp.add_constraint({{v.charge_on, 1}, {v.discharge_on, 1}}, Relation::kLessEqual, 1, detail::tag("es_excl", i, h));
      lp.add_constraint({{v.pv_es, 1}, {v.gr_es, 1}, {v.es_ld, -1}, {v.es_gr, -1}, {m.u[static_cast<std::size_t>(h)], -1}},
                        Relation::kEqual, 0, detail::tag("nonant", i, h));
      m.vars[i].push_back(v);
    }
    if (pl.terminal_soc)
      lp.add_constraint({{m.vars[i].back().soc, 1}}, Relation::kGreaterEqual, prob.soc0,
                        "terminal_s" + std::to_string(i + 1));
  }
  return m;
}

struct DaySchedule {
  std::vector<double> u;                              // kW, positive = net charge
  std::vector<double> probs;                          // per planned scenario
  std::vector<std::vector<double>> planned_soc;       // [scenario][hour], end of hour
  std::vector<std::vector<PowerFlows>> flows;         // [scenario][hour]
  double expected_cost = 0.0;                         // EUR, tariff terms only
  double objective = 0.0;                             // EUR, including penalties
  SolveStatus status = SolveStatus::kOptimal;
  long nodes = 0;

  int horizon() const { return static_cast<int>(u.size()); }
  PowerFlows expected_flows(int hour) const {
    PowerFlows e;
    for (std::size_t i = 0; i < flows.size(); ++i) {
      const auto& f = flows[i][static_cast<std::size_t>(hour)];
      const double p = probs[i];
      e.pv_ld += p * f.pv_ld;
      e.pv_es += p * f.pv_es;
      e.pv_gr += p * f.pv_gr;
      e.gr_ld += p * f.gr_ld;
      e.gr_es += p * f.gr_es;
      e.es_ld += p * f.es_ld;
      e.es_gr += p * f.es_gr;
      e.curtail += p * f.curtail;
      e.shed += p * f.shed;
    }
    return e;
  }
  // Expected net grid exchange (import minus export), kW.
  double expected_net_grid(int hour) const {
    const auto e = expected_flows(hour);
    return e.grid_import() - e.grid_export();
  }
};

// Identical scenarios have identical optimal recourse, so they are merged
// with summed probability before the model is built.
inline DispatchProblem merge_duplicate_scenarios(const DispatchProblem& prob) {
  DispatchProblem out = prob;
  out.scenarios.clear();
  for (const auto& s : prob.scenarios) {
    auto it = std::find_if(out.scenarios.begin(), out.scenarios.end(),
                           [&](const DispatchScenario& o) { return o.gen == s.gen && o.dem == s.dem; });
    if (it == out.scenarios.end()) out.scenarios.push_back(s);
    else it->prob += s.prob;
  }
  double total = 0.0;
  for (const auto& s : out.scenarios) total += s.prob;
  for (auto& s : out.scenarios) s.prob /= total;
  return out;
}

inline DaySchedule solve_day(const DispatchProblem& input, const SolverOptions& opts = {}) {
  input.validate();
  const DispatchProblem prob = merge_duplicate_scenarios(input);
  const auto model = build_model(prob);
  const auto sol = solve_milp(model.lp, opts);
  if (sol.status == SolveStatus::kInfeasible || sol.status == SolveStatus::kUnbounded)
    throw SolverError(std::string("dispatch model is ") + to_string(sol.status));
  if (!sol.has_solution()) throw SolverError("node limit reached without a feasible dispatch");
  if (sol.status == SolveStatus::kNodeLimit)
    std::clog << "warning: dispatch node limit reached; using incumbent\n";

  const int horizon = prob.horizon();
  DaySchedule s;
  s.status = sol.status;
  s.nodes = sol.nodes_explored;
  s.objective = sol.objective;
  // Simplex residue below the feasibility scale is reported as exact zero.
  const auto x = [&](int j) {
    const double v = sol.x[static_cast<std::size_t>(j)];
    return std::abs(v) < 1e-9 ? 0.0 : v;
  };
  for (int h = 0; h < horizon; ++h) s.u.push_back(x(model.u[static_cast<std::size_t>(h)]));
  for (std::size_t i = 0; i < prob.scenarios.size(); ++i) {
    s.probs.push_back(prob.scenarios[i].prob);
    std::vector<double> soc;
    std::vector<PowerFlows> flows;
    for (int h = 0; h < horizon; ++h) {
      const auto& v = model.vars[i][static_cast<std::size_t>(h)];
      PowerFlows f{x(v.pv_ld), x(v.pv_es), x(v.pv_gr), x(v.gr_ld), x(v.gr_es), x(v.es_ld), x(v.es_gr), x(v.curtail),
                   x(v.shed)};
      s.expected_cost += prob.scenarios[i].prob * prob.plant.delta_t *
                         (f.grid_import() * prob.tou_imp[static_cast<std::size_t>(h)] -
                          f.grid_export() * prob.tou_exp[static_cast<std::size_t>(h)]);
      soc.push_back(x(v.soc));
      flows.push_back(f);
    }
    s.planned_soc.push_back(std::move(soc));
    s.flows.push_back(std::move(flows));
  }
  return s;
}

inline DaySchedule solve_day(const ScenarioSet& set, const TariffDay& tariffs, const PlantConfig& plant, double soc0,
                             const SolverOptions& opts = {}) {
  return solve_day(make_problem(set, tariffs, plant, soc0), opts);
}

inline DaySchedule plan_deterministic(const HourlyArray<double>& gen, const HourlyArray<double>& dem,
                                      const TariffDay& tariffs, const PlantConfig& plant, double soc0,
                                      const SolverOptions& opts = {}) {
  ScenarioSet single;
  single.scenarios.push_back({1, gen, dem, 1.0});
  return solve_day(single, tariffs, plant, soc0, opts);
}

}  // namespace bems
