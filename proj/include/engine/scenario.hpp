#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "engine/ability.hpp"
#include "engine/errors.hpp"
#include "engine/expectations.hpp"
#include "engine/model1.hpp"
#include "engine/model2.hpp"
#include "json.hpp"

namespace engine {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct ScenarioTrader {
  double cash = 0.0;
  std::map<std::string, std::int64_t> holdings;  // security id -> units
  double leverage = 0.0;
  double threshold = 1.0;
};

struct NamedBelief {
  std::string id;
  SecurityBelief belief;
};

struct NamedFutures {
  std::string id;
  FuturesSpec spec;
};

struct NamedOption {
  std::string id;
  OptionsSpec spec;
};

// A budget row either in cash form (expanded with cash_budget_row) or as an
// explicit linear row over instrument ids.
struct BudgetRow {
  enum class Kind { Cash, Linear };
  Kind kind = Kind::Cash;
  std::string name;
  double cash = 0.0;
  std::vector<std::pair<std::string, double>> borrows;
  std::vector<std::pair<std::string, double>> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

enum class GameSituation { NoHoldings, Holdings, Derivatives };

struct GameSection {
  GameInputs inputs;  // rows left empty; materialised from budget_rows
  std::vector<BudgetRow> budget_rows;
  GameSituation situation = GameSituation::Holdings;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string id;
  std::string name;
  ScenarioTrader trader;
  std::vector<NamedBelief> beliefs;
  std::vector<NamedFutures> futures;
  std::vector<NamedOption> options;
  std::optional<GameSection> game;
  std::vector<TimeSeries> series;
  std::int64_t created_at = 0;  // microseconds since the epoch
  std::int64_t updated_at = 0;
};

// Money and other reals are written as shortest round-trip decimal strings;
// the reader accepts strings or JSON numbers.
std::string format_decimal(double v);
double parse_decimal(const Json& j, const std::string& path);

// Throws ValidationError with the offending field path.
Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);
void validate_scenario(const Scenario& s);

std::string format_instant(std::int64_t micros);
std::int64_t parse_instant(const std::string& text, const std::string& path);

enum class ModelTag { M1P1, M1P2, M1P4, M2Exact, M2Bound };

std::string_view to_string(ModelTag m);
ModelTag parse_model_tag(const std::string& s);

struct SolveOptions {
  SolveMode mode = SolveMode::Exact;
  double discount = 1.0;
  std::size_t node_limit = 0;  // 0 keeps the solver default
};

SolveOptions solve_options_from_json(const Json& j);
Json solve_options_to_json(const SolveOptions& o);

// Model-1 instance for problems 1, 2 or 4; MissingInputs when absent.
ProblemInstance scenario_problem(const Scenario& s, ModelTag tag, const SolveOptions& o);
GameSpec scenario_game(const Scenario& s);
GameInputs scenario_game_inputs(const Scenario& s);

// The deterministic result document for a solve. CLI and API print exactly this.
Json solve_scenario_result(const Scenario& s, ModelTag tag, const SolveOptions& o);

Json error_json(const EngineError& e);

}  // namespace engine
