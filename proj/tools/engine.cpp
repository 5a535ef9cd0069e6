#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "engine/errors.hpp"
#include "engine/http_api.hpp"
#include "engine/scenario.hpp"
#include "engine/service.hpp"
#include "engine/store.hpp"
#include "httplib.h"

using namespace engine;

namespace {

Scenario load_scenario_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw EngineError(ErrorCode::ValidationError, "cannot open scenario file " + file, "scenario");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw EngineError(ErrorCode::ValidationError, std::string("scenario file is not valid JSON: ") + e.what(), "");
  }
  Scenario s = scenario_from_json(j);
  validate_scenario(s);
  return s;
}

void print_m1(const Json& r) {
  std::cout << r["model"].get<std::string>() << " (" << r["mode"].get<std::string>() << ") " << r["status"].get<std::string>()
            << "\n";
  std::cout << "  expected welfare increment  " << r["expected_welfare_increment"].get<std::string>() << "\n";
  std::cout << "  expected welfare            " << r["expected_welfare"].get<std::string>() << "\n";
  std::cout << "  bound                       " << r["bound"].get<std::string>() << "\n";
  bool any = false;
  for (const auto& v : r["strategy"]) {
    if (v["volume"] == 0) continue;
    any = true;
    std::cout << "  " << v["role"].get<std::string>() << " " << v["instrument"].get<std::string>() << " x " << v["volume"]
              << "\n";
  }
  if (!any) std::cout << "  no trades\n";
}

void print_m2(const Json& r) {
  std::cout << "game value  " << r["value"].get<std::string>() << "\n";
  for (const auto& x : r["x"]) {
    std::cout << "  " << x["id"].get<std::string>() << " (" << x["class"].get<std::string>() << ", "
              << x["group"].get<std::string>() << ") volume ";
    if (x["volume"].is_string())
      std::cout << x["volume"].get<std::string>();
    else
      std::cout << x["volume"];
    std::cout << "\n";
  }
  for (const auto& w : r["w"]) std::cout << "  borrow " << w["name"].get<std::string>() << " = " << w["value"].get<std::string>() << "\n";
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trading strategy engine"};
  app.require_subcommand(1);

  std::string scenario_file;
  std::string mode = "exact";
  int problem = 1;
  bool json = false;
  auto* m1 = app.add_subcommand("solve-m1", "Integer strategy for problems 1, 2 or 4");
  m1->add_option("--scenario", scenario_file, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  m1->add_option("--problem", problem, "Problem number")->required()->check(CLI::IsMember({1, 2, 4}));
  m1->add_option("--mode", mode, "exact or rounded")->check(CLI::IsMember({"exact", "rounded"}));
  m1->add_flag("--json", json, "Print the result JSON");

  bool bound = false, exact = false;
  auto* m2 = app.add_subcommand("solve-m2", "Maximin game solve");
  m2->add_option("--scenario", scenario_file, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  auto* bound_flag = m2->add_flag("--bound", bound, "Linear upper bound and saddle point");
  auto* exact_flag = m2->add_flag("--exact", exact, "Integer maximin");
  bound_flag->excludes(exact_flag);
  m2->add_flag("--json", json, "Print the result JSON");

  auto* ability = app.add_subcommand("ability", "Prediction ability tools");
  ability->require_subcommand(1);
  std::string series_file, predictor = "momentum";
  std::size_t length = 30, trials = 100;
  std::uint64_t seed = 1;
  double p = 0.5, cost = 0.0;
  std::int64_t size = 1;
  auto* est = ability->add_subcommand("estimate", "Estimate hit probability over random segments");
  est->add_option("--series", series_file, "CSV with timestamp,price")->required()->check(CLI::ExistingFile);
  est->add_option("--length", length, "Segment length")->check(CLI::PositiveNumber);
  est->add_option("--trials", trials, "Number of segments")->check(CLI::PositiveNumber);
  est->add_option("--seed", seed, "RNG seed");
  est->add_option("--predictor", predictor, "momentum or oracle")->check(CLI::IsMember({"momentum", "oracle"}));
  est->add_option("--p", p, "Oracle hit probability")->check(CLI::Range(0.0, 1.0));
  bool exact_ci = false;
  est->add_flag("--exact-ci", exact_ci, "Clopper-Pearson interval");
  auto* sim = ability->add_subcommand("simulate", "Trade on a synthetic predictor with hit probability p");
  sim->add_option("--series", series_file, "CSV with timestamp,price")->required()->check(CLI::ExistingFile);
  sim->add_option("--p", p, "Hit probability")->required()->check(CLI::Range(0.0, 1.0));
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--size", size, "Units per trade");
  sim->add_option("--cost", cost, "Cost per trade");
  bool trace = false;
  sim->add_flag("--trace", trace, "Print every step");

  int port = 8080;
  std::string store_path = "engine-store.jsonl", host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "HTTP API");
  serve->add_option("--port", port, "Listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--store", store_path, "Store file");
  serve->add_option("--host", host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*m1) {
      const ModelTag tag = problem == 1 ? ModelTag::M1P1 : problem == 2 ? ModelTag::M1P2 : ModelTag::M1P4;
      SolveOptions o;
      o.mode = mode == "rounded" ? SolveMode::Rounded : SolveMode::Exact;
      const Json r = solve_scenario_result(load_scenario_file(scenario_file), tag, o);
      if (json)
        std::cout << r.dump(2) << "\n";
      else
        print_m1(r);
      return 0;
    }
    if (*m2) {
      if (!bound && !exact) throw EngineError(ErrorCode::ValidationError, "one of --bound or --exact is required", "");
      const Json r = solve_scenario_result(load_scenario_file(scenario_file), exact ? ModelTag::M2Exact : ModelTag::M2Bound, {});
      if (json)
        std::cout << r.dump(2) << "\n";
      else
        print_m2(r);
      return 0;
    }
    if (*est) {
      const TimeSeries s = read_series_csv_file(series_file);
      const auto offsets = sample_segments(s, length, trials, seed);
      const Predictor pred = predictor == "oracle" ? make_oracle_predictor(s, p, seed) : make_momentum_predictor();
      const auto recs = run_trials(s, offsets, length, pred);
      const AbilityEstimate e = estimate_ability(recs, exact_ci ? CiMethod::Exact : CiMethod::Normal);
      Json out = estimate_json(e);
      out["predictor"] = predictor;
      out["length"] = length;
      out["seed"] = seed;
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*sim) {
      const TimeSeries s = read_series_csv_file(series_file);
      const TradingSummary t =
          simulate_trading(s, make_oracle_predictor(s, p, seed), [size](std::size_t) { return size; }, cost);
      Json out;
      out["p"] = p;
      out["seed"] = seed;
      out["steps"] = t.steps;
      out["trades"] = t.trades;
      out["hit_rate"] = t.hit_rate;
      out["total"] = t.total;
      if (trace) {
        Json steps = Json::array();
        for (const auto& st : t.trace)
          steps.push_back(Json{{"step", st.step}, {"prediction", to_string(st.prediction)}, {"position", st.position},
                               {"pnl", st.pnl}, {"cumulative", st.cumulative}});
        out["trace"] = std::move(steps);
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*serve) {
      Store store(store_path);
      Service service(store);
      httplib::Server server;
      install_routes(server, service);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const int bound_port = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
      if (bound_port < 0) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 4;
      }
      std::cerr << "listening on http://" << host << ":" << bound_port << " store " << store.path() << std::endl;
      server.listen_after_bind();
      g_server = nullptr;
      return 0;
    }
  } catch (const EngineError& e) {
    std::cerr << error_json(e).dump(2) << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
