#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "bems/config.hpp"
#include "bems/pipeline.hpp"
#include "bems/report_io.hpp"
#include "bems/synth.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using bems::DataError;

namespace {

std::string dataset_text(int hours, int start_hour = 0) {
  std::ostringstream os;
  os << "timestamp,demand_kw,pv_kw,tou_imp_eur_kwh,tou_exp_eur_kwh\n";
  for (int i = 0; i < hours; ++i) {
    const auto t = bems::hour_stamp(2023, 6, 1, 0) + start_hour + i;
    os << bems::format_timestamp(t) << "," << 0.5 + 0.01 * i << "," << (i % 24 > 6 && i % 24 < 19 ? 1.5 : 0.0)
       << ",0.2,0.08\n";
  }
  return os.str();
}

bems::Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return bems::validate_rows(bems::parse_dataset_rows(in, "test.csv"));
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("bems_io_" + name + "_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Ingest, FortyEightRowFile) {
  const auto dir = temp_dir("ingest");
  const auto path = dir / "two_days.csv";
  std::ofstream(path) << dataset_text(48);
  const std::vector<fs::path> paths{path};
  const auto d = bems::ingest(paths);
  ASSERT_EQ(d.rows.size(), 48u);
  EXPECT_EQ(bems::format_timestamp(d.rows.front().t), "2023-06-01T00:00:00Z");
  EXPECT_EQ(bems::split_days(d).size(), 2u);
  fs::remove_all(dir);
}

TEST(Ingest, MergesFilesInTimeOrder) {
  const auto dir = temp_dir("merge");
  const std::string all = dataset_text(48);
  const auto cut = all.find("2023-06-02T00");
  std::ofstream(dir / "b.csv") << "timestamp,demand_kw,pv_kw,tou_imp_eur_kwh,tou_exp_eur_kwh\n" << all.substr(cut);
  std::ofstream(dir / "a.csv") << all.substr(0, cut);
  const std::vector<fs::path> paths{dir / "b.csv", dir / "a.csv"};
  const auto d = bems::ingest(paths);
  EXPECT_EQ(d.rows.size(), 48u);
  fs::remove_all(dir);
}

TEST(Ingest, DuplicateTimestampIsNamed) {
  auto text = dataset_text(5);
  text += "2023-06-01T02:00:00Z,1,0,0.2,0.08\n";
  EXPECT_NE(error_of(text).find("duplicate timestamp 2023-06-01T02:00:00Z"), std::string::npos) << error_of(text);
}

TEST(Ingest, NegativeDemandIsRejectedWithRow) {
  auto text = dataset_text(3);
  text += "2023-06-01T03:00:00Z,-0.2,0,0.2,0.08\n";
  const auto msg = error_of(text);
  EXPECT_NE(msg.find("row 5"), std::string::npos) << msg;
}

TEST(Ingest, GapNamesTheLastGoodHour) {
  auto text = dataset_text(3);
  text += "2023-06-01T05:00:00Z,1,0,0.2,0.08\n";
  EXPECT_NE(error_of(text).find("gap in data after 2023-06-01T02:00:00Z"), std::string::npos);
}

TEST(Ingest, SchemaErrors) {
  EXPECT_NE(error_of("time,demand\n").find("row 1"), std::string::npos);
  EXPECT_NE(error_of(dataset_text(2) + "2023-06-01T02:00:00Z,abc,0,0.2,0.08\n").find("row 4"), std::string::npos);
  EXPECT_NE(error_of(dataset_text(2) + "2023-06-01T02:00:00Z,1,0,0.2\n").find("row 4"), std::string::npos);
  EXPECT_THROW(parse(""), DataError);
  const std::vector<fs::path> none;
  EXPECT_THROW(bems::ingest(none), DataError);
  const std::vector<fs::path> missing{"/nonexistent/file.csv"};
  EXPECT_THROW(bems::ingest(missing), DataError);
}

TEST(Ingest, CarriageReturnsAreTolerated) {
  std::string text = dataset_text(24);
  std::string crlf;
  for (const char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  EXPECT_EQ(parse(crlf).rows.size(), 24u);
}

TEST(Calendar, TimestampForms) {
  const auto t = bems::hour_stamp(2023, 6, 1, 13);
  EXPECT_EQ(bems::parse_timestamp("2023-06-01T13:00:00Z"), t);
  EXPECT_EQ(bems::parse_timestamp("2023-06-01T13:00"), t);
  EXPECT_EQ(bems::parse_timestamp("2023-06-01 13:00:00+00:00"), t);
  EXPECT_EQ(bems::parse_timestamp("2023-06-01"), t - 13);
  EXPECT_THROW(bems::parse_timestamp("2023-06-01T13:30:00Z"), DataError);
  EXPECT_THROW(bems::parse_timestamp("2023-06-01T13:00:00+02:00"), DataError);
  EXPECT_THROW(bems::parse_timestamp("2023-02-30"), DataError);
  EXPECT_THROW(bems::parse_timestamp("June 1"), DataError);
}

TEST(Calendar, DayOfYear) {
  EXPECT_EQ(bems::day_of_year(bems::hour_stamp(2023, 1, 1, 0)), 1);
  EXPECT_EQ(bems::day_of_year(bems::hour_stamp(2023, 3, 1, 5)), 60);
  EXPECT_EQ(bems::day_of_year(bems::hour_stamp(2024, 3, 1, 5)), 61);
  EXPECT_EQ(bems::day_of_year(bems::hour_stamp(2024, 12, 31, 23)), 366);
  EXPECT_EQ(bems::hour_of(bems::hour_stamp(1969, 12, 31, 22)), 22);
  EXPECT_EQ(bems::format_timestamp(bems::hour_stamp(1969, 12, 31, 22)), "1969-12-31T22:00:00Z");
}

TEST(Calendar, SplitDropsPartialDays) {
  const auto d = parse(dataset_text(60, 5));  // 05:00 on day 1 to 16:00 on day 3
  const auto days = bems::split_days(d);
  ASSERT_EQ(days.size(), 1u);
  EXPECT_EQ(days[0].date, "2023-06-02");
  EXPECT_EQ(days[0].day_of_year, 153);
}

TEST(Csv, NumbersRoundTripExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double x = i % 3 == 0 ? u(rng) * 1e-12 : u(rng);
    EXPECT_EQ(bems::csv::parse_double(bems::csv::format(x), "x", 1), x);
  }
  EXPECT_EQ(bems::csv::format(-0.0), "0");
  EXPECT_EQ(bems::csv::format(0.1), "0.1");
}

TEST(RoundTrip, Dataset) {
  bems::SynthConfig cfg;
  cfg.history_days = 3;
  cfg.eval_days = 0;
  const auto d = bems::synthesize(cfg);
  std::ostringstream os;
  bems::write_dataset(os, d);
  const auto back = parse(os.str());
  ASSERT_EQ(back.rows.size(), d.rows.size());
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].t, d.rows[i].t);
    EXPECT_EQ(back.rows[i].demand_kw, d.rows[i].demand_kw);
    EXPECT_EQ(back.rows[i].pv_kw, d.rows[i].pv_kw);
    EXPECT_EQ(back.rows[i].tou_imp, d.rows[i].tou_imp);
    EXPECT_EQ(back.rows[i].tou_exp, d.rows[i].tou_exp);
  }
  std::ostringstream again;
  bems::write_dataset(again, back);
  EXPECT_EQ(again.str(), os.str());
}

TEST(RoundTrip, Matrix) {
  const auto& hist = fixture::june_history();
  bems::HourlyArray<double> fc{};
  for (int h = 0; h < bems::kHoursPerDay; ++h) fc[h] = 0.3 * h;
  const auto m = bems::total_gen_matrix(hist, fc, 170, 0.5);
  std::ostringstream os;
  bems::write_matrix_csv(os, m);
  std::istringstream in(os.str());
  const auto back = bems::read_matrix_csv(in, m.kind(), m.quantity());
  ASSERT_EQ(back.bins(), m.bins());
  for (int h = 0; h < bems::kHoursPerDay; ++h) {
    EXPECT_EQ(back.range(h), m.range(h));
    for (int k = 0; k < m.bins(); ++k) ASSERT_EQ(back.at(k, h), m.at(k, h));
  }
}

TEST(RoundTrip, ScenariosScheduleLogAndMetrics) {
  const auto& hist = fixture::june_history();
  bems::HourlyArray<double> fg{}, fd{};
  for (int h = 0; h < bems::kHoursPerDay; ++h) {
    fg[h] = h > 5 && h < 20 ? 3.0 : 0.0;
    fd[h] = 0.8;
  }
  const auto gen = bems::total_gen_matrix(hist, fg, 170, 0.5);
  const auto dem = bems::total_dem_matrix(hist, fd, 0.5);
  std::mt19937_64 rng(4);
  const auto set = bems::make_scenarios(gen, dem, hist.location, 170, {}, rng);

  std::ostringstream os;
  bems::write_scenarios_csv(os, set);
  std::istringstream in(os.str());
  const auto back = bems::read_scenarios_csv(in);
  ASSERT_EQ(back.size(), set.size());
  for (std::size_t i = 0; i < set.scenarios.size(); ++i) {
    EXPECT_EQ(back.scenarios[i].id, set.scenarios[i].id);
    EXPECT_EQ(back.scenarios[i].gen, set.scenarios[i].gen);
    EXPECT_EQ(back.scenarios[i].dem, set.scenarios[i].dem);
    EXPECT_EQ(back.scenarios[i].prob, set.scenarios[i].prob);
  }

  bems::TariffDay tariffs;
  for (int h = 0; h < bems::kHoursPerDay; ++h) {
    tariffs.tou_imp[h] = bems::base_import_price(h);
    tariffs.tou_exp[h] = 0.4 * tariffs.tou_imp[h];
  }
  const bems::PlantConfig plant;
  const auto plan = bems::solve_day(set, tariffs, plant, 50.0);
  std::ostringstream ps;
  bems::write_schedule_csv(ps, plan);
  std::istringstream pin(ps.str());
  const auto rows = bems::read_schedule_csv(pin);
  ASSERT_EQ(rows.size(), 24u);
  for (int h = 0; h < 24; ++h) {
    EXPECT_EQ(rows[static_cast<std::size_t>(h)].u, plan.u[static_cast<std::size_t>(h)]);
    EXPECT_EQ(rows[static_cast<std::size_t>(h)].flows.gr_ld, plan.expected_flows(h).gr_ld);
  }

  bems::DayActuals act;
  act.pv = set.scenarios[0].gen;
  act.load = set.scenarios[0].dem;
  act.tariffs = tariffs;
  bems::SimState state{50.0, 0.0};
  const auto log = bems::run_day(0, plan, act, state, plant);
  std::ostringstream ls;
  const auto start = bems::hour_stamp(2023, 6, 19, 0);
  bems::write_hourly_log_csv(ls, "StochasticProposed", log, start);
  std::istringstream lin(ls.str());
  const auto logged = bems::read_hourly_log_csv(lin);
  ASSERT_EQ(logged.size(), log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(logged[i].t, start + static_cast<long>(i));
    EXPECT_EQ(logged[i].policy, "StochasticProposed");
    EXPECT_EQ(logged[i].record.hour, log[i].hour);
    EXPECT_EQ(logged[i].record.flows.pv_es, log[i].flows.pv_es);
    EXPECT_EQ(logged[i].record.soc_after, log[i].soc_after);
    EXPECT_EQ(logged[i].record.cost, log[i].cost);
    EXPECT_EQ(logged[i].record.pv_es_ld, log[i].pv_es_ld);
  }

  const std::vector<bems::MetricsRow> metrics{{"IdealForecast", bems::compute_metrics(log, plant)},
                                              {"RuleBased", {12.5, -3.25, 40.0, 1.0, 2.0}}};
  std::ostringstream ms;
  bems::write_metrics_csv(ms, metrics);
  std::istringstream min(ms.str());
  const auto mback = bems::read_metrics_csv(min);
  ASSERT_EQ(mback.size(), 2u);
  EXPECT_EQ(mback[0].metrics.aeb, metrics[0].metrics.aeb);
  EXPECT_EQ(mback[0].metrics.sfr, metrics[0].metrics.sfr);
  EXPECT_EQ(mback[1].policy, "RuleBased");
  EXPECT_EQ(mback[1].metrics.teeg, 2.0);
}

TEST(Config, DefaultsAreTheReferenceBuilding) {
  const auto c = bems::config_from_json(nlohmann::json::object());
  EXPECT_EQ(c.plant.p_pv_max, 12.0);
  EXPECT_EQ(c.plant.p_es_max, 5.0);
  EXPECT_EQ(c.plant.p_gr_max, 5.0);
  EXPECT_EQ(c.plant.e_cap, 10.0);
  EXPECT_EQ(c.plant.soc_min, 15.0);
  EXPECT_EQ(c.plant.soc_max, 90.0);
  EXPECT_EQ(c.bins, 100);
  EXPECT_EQ(c.scenarios.count, 100);
  EXPECT_EQ(c.scenarios.keep, 10);
  EXPECT_EQ(c.scenarios.lambda, 0.5);
}

TEST(Config, JsonRoundTripAndOverrides) {
  auto j = bems::config_to_json(bems::RunConfig{});
  j["scenarios"]["keep"] = 5;
  j["forecast"]["provider"] = "Persistence";
  j["plant"]["e_cap"] = 13.5;
  const auto c = bems::config_from_json(j);
  EXPECT_EQ(c.scenarios.keep, 5);
  EXPECT_EQ(c.forecast.kind, bems::ProviderKind::kPersistence);
  EXPECT_EQ(c.plant.e_cap, 13.5);
  EXPECT_EQ(bems::config_to_json(c), j);
}

TEST(Config, InvalidValuesAreRejected) {
  auto j = bems::config_to_json(bems::RunConfig{});
  j["scenarios"]["keep"] = 200;
  EXPECT_THROW(bems::config_from_json(j), std::invalid_argument);
  j = bems::config_to_json(bems::RunConfig{});
  j["bins"] = 1;
  EXPECT_THROW(bems::config_from_json(j), std::invalid_argument);
  j = bems::config_to_json(bems::RunConfig{});
  j["plant"]["soc_min"] = 95.0;
  EXPECT_THROW(bems::config_from_json(j), std::invalid_argument);
  j = bems::config_to_json(bems::RunConfig{});
  j["forecast"]["provider"] = "LSTM";
  EXPECT_THROW(bems::config_from_json(j), std::invalid_argument);
}

TEST(Config, DataPathsResolveAgainstConfigFile) {
  const auto dir = temp_dir("config");
  fs::create_directories(dir / "conf");
  std::ofstream(dir / "conf" / "run.json") << R"({"data": ["../data/x.csv", "/abs/y.csv"], "seed": 7})";
  const auto c = bems::load_config(dir / "conf" / "run.json");
  ASSERT_EQ(c.data.size(), 2u);
  EXPECT_EQ(fs::path(c.data[0]), (dir / "data" / "x.csv").lexically_normal());
  EXPECT_EQ(c.data[1], "/abs/y.csv");
  EXPECT_EQ(c.seed, 7u);
  std::ofstream(dir / "conf" / "bad.json") << "{ not json";
  EXPECT_THROW(bems::load_config(dir / "conf" / "bad.json"), std::invalid_argument);
  fs::remove_all(dir);
}

TEST(Synth, DeterministicAndWithinPhysicalBounds) {
  bems::SynthConfig cfg;
  cfg.history_days = 20;
  cfg.eval_days = 5;
  const auto a = bems::synthesize(cfg), b = bems::synthesize(cfg);
  std::ostringstream sa, sb;
  bems::write_dataset(sa, a);
  bems::write_dataset(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  cfg.seed = 43;
  std::ostringstream sc;
  bems::write_dataset(sc, bems::synthesize(cfg));
  EXPECT_NE(sa.str(), sc.str());
  ASSERT_EQ(a.rows.size(), 25u * 24u);
  for (const auto& r : a.rows) {
    const int doy = bems::day_of_year(r.t);
    EXPECT_LE(r.pv_kw, bems::clear_sky_pv(cfg.location, doy, bems::hour_of(r.t), cfg.plant));
    EXPECT_GE(r.pv_kw, 0.0);
    EXPECT_GE(r.demand_kw, 0.1);
    EXPECT_LE(r.demand_kw, 4.5);
    EXPECT_LT(r.tou_exp, r.tou_imp);
  }
}

TEST(Workspace, EvaluationWindowMustBeCovered) {
  bems::SynthConfig sc;
  sc.start_date = "2023-04-01";
  sc.history_days = 70;
  sc.eval_days = 2;
  const auto data = bems::synthesize(sc);
  bems::RunConfig cfg;
  cfg.eval_from = "2023-06-10";
  cfg.eval_to = "2023-06-11";
  const bems::Workspace ws(cfg, data);
  EXPECT_EQ(ws.evaluation_days().size(), 2u);
  EXPECT_EQ(ws.evaluation_days().front().date, "2023-06-10");
  EXPECT_THROW(ws.day_index("2023-06-12"), DataError);

  cfg.eval_to = "2023-06-14";
  EXPECT_THROW(bems::Workspace(cfg, data), DataError);
  cfg.eval_from = "2023-04-01";
  cfg.eval_to = "2023-04-02";
  EXPECT_THROW(bems::Workspace(cfg, data), bems::InsufficientHistory);
  cfg.eval_from = "2023-04-20";  // shorter than the envelope window
  cfg.eval_to = "2023-04-21";
  EXPECT_THROW(bems::Workspace(cfg, data), bems::InsufficientHistory);
}

TEST(Workspace, InputsDoNotDependOnCallOrder) {
  bems::SynthConfig sc;
  sc.start_date = "2023-04-01";
  sc.history_days = 70;
  sc.eval_days = 2;
  bems::RunConfig cfg;
  cfg.eval_from = "2023-06-10";
  cfg.eval_to = "2023-06-11";
  const bems::Workspace ws(cfg, bems::synthesize(sc));
  const auto i = ws.day_index("2023-06-11");
  const auto first = ws.inputs(i);
  ws.inputs(ws.day_index("2023-06-10"));
  const auto second = ws.inputs(i);
  EXPECT_EQ(first.forecast_gen, second.forecast_gen);
  EXPECT_EQ(first.forecast_dem, second.forecast_dem);
  EXPECT_NE(first.forecast_dem, first.actual_dem);  // NoisyOracle by default
}
