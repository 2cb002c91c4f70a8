#pragma once

// Command-line surface. Exit codes: 0 success, 1 usage or configuration
// error, 2 data error, 3 solver failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bems/config.hpp"
#include "bems/errors.hpp"
#include "bems/pipeline.hpp"
#include "bems/report_io.hpp"
#include "bems/svg.hpp"
#include "bems/synth.hpp"

namespace bems {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitSolver = 3;

namespace cli {

namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::vector<std::string> data;
  std::optional<std::uint64_t> seed;
  std::string provider;
};

inline RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (!c.data.empty()) cfg.data = c.data;
  if (c.seed) cfg.seed = *c.seed;
  if (!c.provider.empty()) cfg.forecast.kind = parse_provider(c.provider);
  cfg.validate();
  return cfg;
}

inline std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  return os;
}

template <class Fn>
void emit(const fs::path& path, std::ostream& log, Fn&& write) {
  auto os = open_out(path);
  write(os);
  log << "wrote " << path.string() << '\n';
}

inline std::vector<double> to_vector(const HourlyArray<double>& a) { return {a.begin(), a.end()}; }

inline void cmd_synth(const SynthConfig& sc, const fs::path& out, std::ostream& log) {
  const auto d = synthesize(sc);
  emit(out, log, [&](std::ostream& os) { write_dataset(os, d); });
}

inline void cmd_build_probs(const Workspace& ws, const std::string& date, const fs::path& dir, std::ostream& log) {
  const auto index = ws.day_index(date);
  const auto in = ws.inputs(index);
  const auto& hist = ws.history();
  const double lambda = ws.config().scenarios.lambda;
  const auto gen_f = forecast_gen_matrix(hist, in.forecast_gen, in.day_of_year);
  const auto gen_h = anchor_pv_matrix(hist.pv_classes, hist.envelope, in.day_of_year);
  const auto dem_f = forecast_dem_matrix(hist, in.forecast_dem);
  const auto gen_t = combine(gen_f, gen_h, lambda);
  const auto dem_t = combine(dem_f, hist.demand, lambda);
  const std::pair<const char*, const ProbabilityMatrix*> outputs[] = {
      {"gen_forecast", &gen_f}, {"gen_historical", &gen_h}, {"gen_total", &gen_t},
      {"dem_forecast", &dem_f}, {"dem_historical", &hist.demand}, {"dem_total", &dem_t}};
  for (const auto& [name, m] : outputs)
    emit(dir / (std::string(name) + ".csv"), log, [&](std::ostream& os) { write_matrix_csv(os, *m); });
  emit(dir / "gen_total.svg", log,
       [&](std::ostream& os) { svg::heat_map(os, "PV generation probability, " + date, gen_t); });
  emit(dir / "dem_total.svg", log, [&](std::ostream& os) { svg::heat_map(os, "Demand probability, " + date, dem_t); });
}

inline ScenarioSet day_scenarios(const Workspace& ws, std::size_t index) {
  const auto in = ws.inputs(index);
  const auto& cfg = ws.config();
  const auto gen = total_gen_matrix(ws.history(), in.forecast_gen, in.day_of_year, cfg.scenarios.lambda);
  const auto dem = total_dem_matrix(ws.history(), in.forecast_dem, cfg.scenarios.lambda);
  auto rng = ws.scenario_rng(index);
  return make_scenarios(gen, dem, cfg.location, in.day_of_year, cfg.scenarios, rng);
}

inline void cmd_gen_scenarios(const Workspace& ws, const std::string& date, const fs::path& dir, std::ostream& log) {
  const auto set = day_scenarios(ws, ws.day_index(date));
  emit(dir / "scenarios.csv", log, [&](std::ostream& os) { write_scenarios_csv(os, set); });
  double peak = 0.0;
  for (const auto& sc : set.scenarios) peak = std::max(peak, sc.prob);
  std::vector<svg::Series> series;
  for (const auto& sc : set.scenarios) {
    const double a = 0.25 + 0.75 * sc.prob / peak;
    series.push_back({series.empty() ? "PV" : "", to_vector(sc.gen), "#e6850e", a});
    series.push_back({series.size() == 1 ? "demand" : "", to_vector(sc.dem), "#1f77b4", a});
  }
  emit(dir / "scenarios.svg", log,
       [&](std::ostream& os) { svg::line_chart(os, "Selected scenarios, " + date, "kW", series); });
}

inline void cmd_plan_day(const Workspace& ws, const std::string& date, PolicyKind kind, std::optional<double> soc,
                         const fs::path& dir, std::ostream& log) {
  if (kind == PolicyKind::kRuleBased) throw std::invalid_argument("RuleBased decides hour by hour and has no day plan");
  const double soc0 = soc.value_or(ws.config().plant.soc_init);
  const auto plan = ws.plan(kind, ws.day_index(date), soc0);
  const std::string stem = std::string("schedule_") + to_string(kind);
  emit(dir / (stem + ".csv"), log, [&](std::ostream& os) { write_schedule_csv(os, *plan); });
  std::vector<double> grid;
  for (int h = 0; h < plan->horizon(); ++h) grid.push_back(plan->expected_net_grid(h));
  emit(dir / (stem + ".svg"), log, [&](std::ostream& os) {
    svg::line_chart(os, std::string(to_string(kind)) + " plan, " + date, "kW",
                    {{"battery u", plan->u, "#2ca02c"}, {"net grid", grid, "#d62728"}});
  });
  log << "expected cost " << csv::format(plan->expected_cost) << " EUR, " << plan->nodes << " nodes\n";
}

inline std::vector<MetricsRow> run_policies(const Workspace& ws, const std::vector<PolicyKind>& kinds,
                                            const fs::path& dir, std::ostream& log, bool chart) {
  std::vector<std::future<SimulationResult>> jobs;
  for (const auto k : kinds) jobs.push_back(std::async(std::launch::async, [&ws, k] { return ws.simulate(k); }));
  std::vector<SimulationResult> results;
  for (auto& j : jobs) results.push_back(j.get());

  const HourStamp start = ws.evaluation_days().front().start;
  std::vector<MetricsRow> rows;
  std::vector<svg::Series> series;
  const char* colors[] = {"#7f7f7f", "#1f77b4", "#2ca02c", "#d62728"};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const std::string name = to_string(kinds[i]);
    emit(dir / ("hourly_" + name + ".csv"), log,
         [&](std::ostream& os) { write_hourly_log_csv(os, name, results[i].log, start); });
    rows.push_back({name, results[i].metrics});
    std::vector<double> cumulative;
    double total = 0.0;
    for (const auto& r : results[i].log) cumulative.push_back(total += r.cost);
    series.push_back({name, cumulative, colors[static_cast<int>(kinds[i])]});
  }
  emit(dir / "metrics.csv", log, [&](std::ostream& os) { write_metrics_csv(os, rows); });
  if (chart)
    emit(dir / "report.svg", log,
         [&](std::ostream& os) { svg::line_chart(os, "Cumulative electricity bill", "EUR", series); });
  return rows;
}

inline void print_table(std::ostream& out, const std::vector<MetricsRow>& rows) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-20s %9s %10s %9s %11s %11s\n", "policy", "SFR (%)", "AEB (EUR)", "ABCL (%)",
                "TIEG (kWh)", "TEEG (kWh)");
  out << buf;
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    std::snprintf(buf, sizeof buf, "%-20s %9.2f %10.2f %9.2f %11.2f %11.2f\n", r.policy.c_str(), m.sfr, m.aeb, m.abcl,
                  m.tieg, m.teeg);
    out << buf;
  }
}

}  // namespace cli

inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  using namespace cli;
  CLI::App app{"Forecast-driven stochastic building energy management"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--data", common.data, "dataset CSV (repeatable; overrides the config)");
  app.add_option("--seed", common.seed, "override the configured seed");
  app.add_option("--provider", common.provider, "forecast provider: Oracle, NoisyOracle or Persistence");

  SynthConfig sc;
  std::string synth_out = "data/synthetic.csv";
  auto* synth = app.add_subcommand("synth-data", "write the seeded synthetic dataset");
  synth->add_option("--out", synth_out, "output CSV");
  synth->add_option("--start", sc.start_date, "first day, YYYY-MM-DD");
  synth->add_option("--history-days", sc.history_days);
  synth->add_option("--eval-days", sc.eval_days);

  std::string date, out_dir = "out", policy_name = "StochasticProposed", from, to;
  std::optional<double> soc;
  std::vector<std::string> policy_names;
  auto* probs = app.add_subcommand("build-probs", "write forecast, historical and combined probability matrices");
  probs->add_option("--date", date, "evaluation day (default: first evaluation day)");
  probs->add_option("--out", out_dir, "output directory");
  auto* scen = app.add_subcommand("gen-scenarios", "write the selected scenarios of one day");
  scen->add_option("--date", date);
  scen->add_option("--out", out_dir);
  auto* plan = app.add_subcommand("plan-day", "solve one day-ahead plan");
  plan->add_option("--date", date);
  plan->add_option("--policy", policy_name);
  plan->add_option("--soc", soc, "initial SoC in % (default: plant soc_init)");
  plan->add_option("--out", out_dir);
  auto* sim = app.add_subcommand("simulate", "simulate policies over a date range");
  sim->add_option("--from", from);
  sim->add_option("--to", to);
  sim->add_option("--policy", policy_names, "repeatable; default all four");
  sim->add_option("--out", out_dir);
  auto* report = app.add_subcommand("report", "compare all four policies over the evaluation window");
  report->add_option("--from", from);
  report->add_option("--to", to);
  report->add_option("--out", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      const auto cfg = resolve(common);
      sc.seed = cfg.seed;
      sc.location = cfg.location;
      sc.plant = cfg.plant;
      cmd_synth(sc, synth_out, out);
      return kExitOk;
    }
    auto cfg = resolve(common);
    if (!from.empty()) cfg.eval_from = from;
    if (!to.empty()) cfg.eval_to = to;
    const auto ws = Workspace::load(cfg);
    if (date.empty()) date = ws.config().eval_from;
    if (probs->parsed()) {
      cmd_build_probs(ws, date, out_dir, out);
    } else if (scen->parsed()) {
      cmd_gen_scenarios(ws, date, out_dir, out);
    } else if (plan->parsed()) {
      cmd_plan_day(ws, date, parse_policy(policy_name), soc, out_dir, out);
    } else if (sim->parsed()) {
      std::vector<PolicyKind> kinds;
      for (const auto& n : policy_names) kinds.push_back(parse_policy(n));
      if (kinds.empty()) kinds.assign(std::begin(kAllPolicies), std::end(kAllPolicies));
      print_table(out, run_policies(ws, kinds, out_dir, out, false));
    } else if (report->parsed()) {
      const std::vector<PolicyKind> kinds(std::begin(kAllPolicies), std::end(kAllPolicies));
      print_table(out, run_policies(ws, kinds, out_dir, out, true));
    }
    return kExitOk;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace bems
