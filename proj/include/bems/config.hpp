#pragma once

// Run configuration, stored as one JSON document. Every field is optional;
// missing fields keep the reference-building defaults.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bems/forecasting.hpp"
#include "bems/milp_solver.hpp"
#include "bems/plant.hpp"
#include "bems/policies.hpp"

namespace bems {

struct RunConfig {
  PlantConfig plant;
  GeoLocation location;
  int bins = kDefaultBins;
  ScenarioConfig scenarios;
  ForecastSettings forecast;
  SolverOptions solver;
  std::uint64_t seed = 42;
  std::vector<std::string> data;  // dataset CSV paths
  std::string eval_from = "2023-06-01";
  std::string eval_to = "2023-06-30";

  void validate() const {
    plant.validate();
    location.validate();
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    scenarios.validate();
    forecast.validate();
    solver.validate();
  }
};

namespace detail {
template <class T>
void take(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  using detail::take;
  RunConfig c;
  if (j.contains("plant")) {
    const auto& p = j.at("plant");
    take(p, "p_pv_max", c.plant.p_pv_max);
    take(p, "p_es_max", c.plant.p_es_max);
    take(p, "p_gr_max", c.plant.p_gr_max);
    take(p, "e_cap", c.plant.e_cap);
    take(p, "soc_min", c.plant.soc_min);
    take(p, "soc_max", c.plant.soc_max);
    take(p, "soc_init", c.plant.soc_init);
    take(p, "eta_c", c.plant.eta_c);
    take(p, "eta_d", c.plant.eta_d);
    take(p, "delta_t", c.plant.delta_t);
    take(p, "pv_stc", c.plant.pv_stc);
    take(p, "pv_derate", c.plant.pv_derate);
    take(p, "shed_penalty", c.plant.shed_penalty);
    take(p, "curtail_penalty", c.plant.curtail_penalty);
    take(p, "terminal_soc", c.plant.terminal_soc);
  }
  if (j.contains("location")) {
    take(j.at("location"), "latitude", c.location.latitude);
    take(j.at("location"), "longitude", c.location.longitude);
  }
  take(j, "bins", c.bins);
  if (j.contains("scenarios")) {
    const auto& s = j.at("scenarios");
    take(s, "count", c.scenarios.count);
    take(s, "keep", c.scenarios.keep);
    take(s, "lambda", c.scenarios.lambda);
    take(s, "shuffle_strata", c.scenarios.shuffle_strata);
  }
  if (j.contains("forecast")) {
    const auto& f = j.at("forecast");
    if (f.contains("provider")) c.forecast.kind = parse_provider(f.at("provider").get<std::string>());
    take(f, "alpha_gen", c.forecast.alpha_gen);
    take(f, "alpha_dem", c.forecast.alpha_dem);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    take(s, "feasibility_tol", c.solver.feasibility_tol);
    take(s, "integrality_tol", c.solver.integrality_tol);
    take(s, "relative_gap", c.solver.relative_gap);
    take(s, "max_nodes", c.solver.max_nodes);
  }
  take(j, "seed", c.seed);
  take(j, "data", c.data);
  take(j, "eval_from", c.eval_from);
  take(j, "eval_to", c.eval_to);
  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  const auto& p = c.plant;
  return {
      {"plant",
       {{"p_pv_max", p.p_pv_max}, {"p_es_max", p.p_es_max}, {"p_gr_max", p.p_gr_max}, {"e_cap", p.e_cap},
        {"soc_min", p.soc_min}, {"soc_max", p.soc_max}, {"soc_init", p.soc_init}, {"eta_c", p.eta_c},
        {"eta_d", p.eta_d}, {"delta_t", p.delta_t}, {"pv_stc", p.pv_stc}, {"pv_derate", p.pv_derate},
        {"shed_penalty", p.shed_penalty}, {"curtail_penalty", p.curtail_penalty}, {"terminal_soc", p.terminal_soc}}},
      {"location", {{"latitude", c.location.latitude}, {"longitude", c.location.longitude}}},
      {"bins", c.bins},
      {"scenarios",
       {{"count", c.scenarios.count}, {"keep", c.scenarios.keep}, {"lambda", c.scenarios.lambda},
        {"shuffle_strata", c.scenarios.shuffle_strata}}},
      {"forecast",
       {{"provider", to_string(c.forecast.kind)}, {"alpha_gen", c.forecast.alpha_gen},
        {"alpha_dem", c.forecast.alpha_dem}}},
      {"solver",
       {{"feasibility_tol", c.solver.feasibility_tol}, {"integrality_tol", c.solver.integrality_tol},
        {"relative_gap", c.solver.relative_gap}, {"max_nodes", c.solver.max_nodes}}},
      {"seed", c.seed},
      {"data", c.data},
      {"eval_from", c.eval_from},
      {"eval_to", c.eval_to},
  };
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  try {
    auto c = config_from_json(j);
    // Relative data paths resolve against the config file's directory.
    for (auto& d : c.data)
      if (std::filesystem::path(d).is_relative()) d = (path.parent_path() / d).lexically_normal().string();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
}

}  // namespace bems
