#include "engine/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "engine/errors.hpp"

namespace engine {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw EngineError(ErrorCode::ValidationError, msg, path);
}

std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void check_belief(const SecurityBelief& b, const std::string& path) {
  if (!(b.price_now > 0.0)) invalid(path + ".price_now", "price_now must be positive");
  if (!(b.price_min >= 0.0)) invalid(path + ".price_min", "price_min must be nonnegative");
  if (!(b.price_min <= b.price_now)) invalid(path + ".price_min", "price_min must not exceed price_now");
  if (!(b.price_now <= b.price_max)) invalid(path + ".price_max", "price_max must not be below price_now");
  if (!(b.p > 0.0 && b.p <= 1.0)) invalid(path + ".p", "p must lie in (0, 1]");
  try {
    validate_belief(b);
  } catch (const EngineError& e) {
    invalid(path, e.what());
  }
}

void check_id(const std::string& id, const std::string& path, std::set<std::string>& seen) {
  if (id.empty()) invalid(path + ".id", "id must not be empty");
  if (!seen.insert(id).second) invalid(path + ".id", "duplicate id " + id);
}

// Model-2 validation paths are relative to the game inputs.
std::string game_path(const std::string& p) {
  if (p.rfind("budget_rows", 0) == 0) return "game_inputs." + p;
  if (p.rfind("game_inputs", 0) == 0) return p;
  return "game_inputs.groups." + p;
}

Holdings index_holdings(const Scenario& s) {
  Holdings h;
  for (std::size_t i = 0; i < s.beliefs.size(); ++i)
    if (auto it = s.trader.holdings.find(s.beliefs[i].id); it != s.trader.holdings.end() && it->second > 0)
      h[i] = it->second;
  return h;
}

TraderState trader_state(const Scenario& s) {
  TraderState t;
  t.cash = s.trader.cash;
  t.leverage = s.trader.leverage;
  t.threshold = s.trader.threshold;
  t.holdings = index_holdings(s);
  return t;
}

// Results are reported to 12 significant digits so simplex round-off such as
// 0.8999999999999999 prints as 0.9.
double clean(double v) {
  if (std::abs(v) < 1e-12 || !std::isfinite(v)) return std::abs(v) < 1e-12 ? 0.0 : v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}
std::string dec(double v) { return format_decimal(clean(v)); }

std::string instrument_id(const Scenario& s, const VariableRole& r) {
  switch (r.cls) {
    case InstrumentClass::Security: return s.beliefs.at(r.instrument).id;
    case InstrumentClass::Futures: return s.futures.at(r.instrument).id;
    case InstrumentClass::Option: return s.options.at(r.instrument).id;
  }
  return {};
}

std::string situation_name(GameSituation g) {
  switch (g) {
    case GameSituation::NoHoldings: return "no_holdings";
    case GameSituation::Holdings: return "holdings";
    case GameSituation::Derivatives: return "derivatives";
  }
  return "holdings";
}

Json x_entries(const GameSpec& g, const std::vector<double>& x, bool integral) {
  Json arr = Json::array();
  for (const auto& b : g.blocks)
    for (std::size_t j = b.x_offset; j < b.x_offset + b.size; ++j) {
      Json e;
      e["id"] = g.x_names[j];
      e["class"] = to_string(b.cls);
      e["group"] = to_string(b.kind);
      if (integral) e["volume"] = std::llround(x[j]);
      else e["volume"] = dec(x[j]);
      arr.push_back(std::move(e));
    }
  return arr;
}

Json w_entries(const GameSpec& g, const std::vector<double>& w) {
  Json arr = Json::array();
  for (std::size_t k = 0; k < w.size(); ++k) arr.push_back(Json{{"name", g.w_names[k]}, {"value", dec(w[k])}});
  return arr;
}

}  // namespace

void validate_scenario(const Scenario& s) {
  if (s.schema_version != kSchemaVersion) invalid("schema_version", "unsupported schema_version");
  const auto& t = s.trader;
  if (!std::isfinite(t.cash) || t.cash < 0) invalid("trader_state.cash", "cash must be nonnegative");
  if (!std::isfinite(t.leverage) || t.leverage < 0) invalid("trader_state.leverage", "leverage must be nonnegative");
  if (!std::isfinite(t.threshold) || t.threshold <= 0) invalid("trader_state.threshold", "threshold must be positive");

  std::set<std::string> ids;
  for (std::size_t i = 0; i < s.beliefs.size(); ++i) {
    check_id(s.beliefs[i].id, at("beliefs", i), ids);
    check_belief(s.beliefs[i].belief, at("beliefs", i));
  }
  for (const auto& [id, v] : t.holdings) {
    if (!ids.count(id)) invalid("trader_state.holdings." + id, "holding names a security without a belief");
    if (v < 0) invalid("trader_state.holdings." + id, "holdings must be nonnegative");
  }
  for (std::size_t j = 0; j < s.futures.size(); ++j) {
    const std::string p = at("futures", j);
    const auto& f = s.futures[j];
    check_id(f.id, p, ids);
    check_belief(f.spec.belief, p);
    if (!(f.spec.strike_basis >= 0)) invalid(p + ".strike", "strike must be nonnegative");
    if (!(f.spec.carry_cost >= 0)) invalid(p + ".carry_cost", "carry_cost must be nonnegative");
    if (f.spec.held_volume < 0) invalid(p + ".held", "held volume must be nonnegative");
    try {
      futures_unit_expectation(f.spec);
    } catch (const EngineError& e) {
      invalid(p + ".strike", e.what());
    }
  }
  for (std::size_t l = 0; l < s.options.size(); ++l) {
    const std::string p = at("options", l);
    const auto& o = s.options[l];
    check_id(o.id, p, ids);
    check_belief(o.spec.belief, p);
    if (!(o.spec.strike >= 0)) invalid(p + ".strike", "strike must be nonnegative");
    if (!(o.spec.premium >= 0)) invalid(p + ".premium", "premium must be nonnegative");
    if (o.spec.held_volume < 0) invalid(p + ".held", "held volume must be nonnegative");
    try {
      options_unit_expectation(o.spec);
    } catch (const EngineError& e) {
      invalid(p + ".strike", e.what());
    }
  }

  if (s.game) {
    std::set<std::string> gids;
    for (const auto* c : {&s.game->inputs.securities, &s.game->inputs.futures, &s.game->inputs.options})
      for (const auto& g : c->instruments) gids.insert(g.id);
    for (std::size_t k = 0; k < s.game->budget_rows.size(); ++k) {
      const auto& r = s.game->budget_rows[k];
      const std::string p = at("game_inputs.budget_rows", k);
      for (const auto& [id, units] : r.borrows) {
        if (!gids.count(id)) invalid(p + ".borrows." + id, "borrowed instrument is not in the game groups");
        if (!(units >= 0)) invalid(p + ".borrows." + id, "borrowed units must be nonnegative");
      }
      for (const auto& [id, c] : r.terms)
        if (!gids.count(id)) invalid(p + ".terms." + id, "term names an instrument not in the game groups");
      if (r.kind == BudgetRow::Kind::Cash && !(r.cash >= 0)) invalid(p + ".cash", "cash must be nonnegative");
    }
    try {
      scenario_game(s);
    } catch (const EngineError& e) {
      if (e.code() == ErrorCode::InvalidSpec || e.code() == ErrorCode::InvalidBelief) invalid(game_path(e.path()), e.what());
      // Empty exchange and incompatible budgets are solve-time outcomes.
      if (e.code() != ErrorCode::EmptyExchangePolyhedron && e.code() != ErrorCode::IncompatibleBudget) throw;
    }
  }

  for (std::size_t k = 0; k < s.series.size(); ++k) {
    try {
      s.series[k].validate();
    } catch (const EngineError& e) {
      invalid(at("series", k) + "." + e.path(), e.what());
    }
  }
}

std::string_view to_string(ModelTag m) {
  switch (m) {
    case ModelTag::M1P1: return "M1P1";
    case ModelTag::M1P2: return "M1P2";
    case ModelTag::M1P4: return "M1P4";
    case ModelTag::M2Exact: return "M2Exact";
    case ModelTag::M2Bound: return "M2Bound";
  }
  return "?";
}

ModelTag parse_model_tag(const std::string& s) {
  for (ModelTag m : {ModelTag::M1P1, ModelTag::M1P2, ModelTag::M1P4, ModelTag::M2Exact, ModelTag::M2Bound})
    if (s == to_string(m)) return m;
  invalid("model", "model must be one of M1P1, M1P2, M1P4, M2Exact, M2Bound");
}

SolveOptions solve_options_from_json(const Json& j) {
  SolveOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) invalid("options", "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "mode") {
      if (!it->is_string()) invalid("options.mode", "mode must be exact or rounded");
      const auto m = it->get<std::string>();
      if (m == "exact") o.mode = SolveMode::Exact;
      else if (m == "rounded") o.mode = SolveMode::Rounded;
      else invalid("options.mode", "mode must be exact or rounded");
    } else if (k == "discount") {
      o.discount = parse_decimal(*it, "options.discount");
      if (!(o.discount > 0)) invalid("options.discount", "discount must be positive");
    } else if (k == "node_limit") {
      if (!it->is_number_unsigned()) invalid("options.node_limit", "node_limit must be a nonnegative integer");
      o.node_limit = it->get<std::size_t>();
    } else {
      invalid("options." + k, "unknown field");
    }
  }
  return o;
}

Json solve_options_to_json(const SolveOptions& o) {
  Json j;
  j["mode"] = o.mode == SolveMode::Exact ? "exact" : "rounded";
  j["discount"] = format_decimal(o.discount);
  j["node_limit"] = o.node_limit;
  return j;
}

ProblemInstance scenario_problem(const Scenario& s, ModelTag tag, const SolveOptions& o) {
  const TraderState st = trader_state(s);
  std::vector<SecurityBelief> beliefs;
  for (const auto& b : s.beliefs) beliefs.push_back(b.belief);
  BuildOptions build;
  build.discount = o.discount;
  switch (tag) {
    case ModelTag::M1P1:
    case ModelTag::M1P2: {
      const Partition part = classify_positive(beliefs, st.holdings);
      return tag == ModelTag::M1P1 ? build_problem1(st, beliefs, part, build) : build_problem2(st, beliefs, part, build);
    }
    case ModelTag::M1P4: {
      std::vector<FuturesSpec> fut;
      std::vector<OptionsSpec> opt;
      for (const auto& f : s.futures) fut.push_back(f.spec);
      for (const auto& op : s.options) opt.push_back(op.spec);
      return build_problem4(st, beliefs, fut, opt, build);
    }
    default:
      throw EngineError(ErrorCode::ValidationError, "not a Model 1 tag", "model");
  }
}

GameInputs scenario_game_inputs(const Scenario& s) {
  if (!s.game) throw EngineError(ErrorCode::MissingInputs, "the scenario has no game_inputs section", "game_inputs");
  GameInputs in = s.game->inputs;
  for (const auto& r : s.game->budget_rows) {
    if (r.kind == BudgetRow::Kind::Cash) {
      in.rows.push_back(cash_budget_row(in, r.cash, r.borrows, r.name));
    } else {
      TraderRow row;
      row.name = r.name;
      row.terms = r.terms;
      row.sense = r.sense;
      row.rhs = r.rhs;
      in.rows.push_back(std::move(row));
    }
  }
  return in;
}

GameSpec scenario_game(const Scenario& s) {
  const GameInputs in = scenario_game_inputs(s);
  switch (s.game->situation) {
    case GameSituation::NoHoldings: return build_game(in);
    case GameSituation::Holdings: return build_game_with_holdings(in);
    case GameSituation::Derivatives: return build_derivative_game(in);
  }
  return build_derivative_game(in);
}

Json solve_scenario_result(const Scenario& s, ModelTag tag, const SolveOptions& o) {
  Json out;
  out["model"] = to_string(tag);
  out["scenario_id"] = s.id;
  if (tag == ModelTag::M1P1 || tag == ModelTag::M1P2 || tag == ModelTag::M1P4) {
    const ProblemInstance inst = scenario_problem(s, tag, o);
    const StrategyResult r = solve_model1(inst, o.mode);
    out["mode"] = o.mode == SolveMode::Exact ? "exact" : "rounded";
    out["status"] = to_string(r.status);
    out["welfare_now"] = dec(inst.welfare_now);
    out["expected_welfare_increment"] = dec(r.expected_welfare_increment);
    out["expected_welfare"] = dec(r.expected_welfare);
    out["bound"] = dec(r.bound);
    out["nodes_explored"] = r.nodes_explored;
    Json strategy = Json::array();
    for (const auto& v : r.volumes) {
      Json e;
      e["instrument"] = instrument_id(s, v.var);
      e["class"] = to_string(v.var.cls);
      e["role"] = to_string(v.var.role);
      e["volume"] = v.volume;
      strategy.push_back(std::move(e));
    }
    out["strategy"] = std::move(strategy);
    Json contra = Json::array();
    for (std::size_t i : inst.contradictions) contra.push_back(s.beliefs.at(i).id);
    out["contradictions"] = std::move(contra);
    return out;
  }

  const GameSpec g = scenario_game(s);
  out["situation"] = situation_name(s.game->situation);
  if (tag == ModelTag::M2Bound) {
    const SaddlePointResult r = solve_maximin_upper_bound(g);
    out["value"] = dec(r.value);
    out["dual_value"] = dec(r.dual_value);
    out["x"] = x_entries(g, r.x_star, false);
    out["w"] = w_entries(g, r.w_star);
    Json h = Json::array();
    for (double v : r.h_star) h.push_back(dec(v));
    out["h"] = std::move(h);
    Json u = Json::array();
    for (std::size_t i = 0; i < r.pi_star.size(); ++i)
      u.push_back(Json{{"row", g.trader_row_names[i]}, {"value", dec(r.pi_star[i])}});
    out["u"] = std::move(u);
    return out;
  }
  MilpOptions mo;
  if (o.node_limit) mo.node_limit = o.node_limit;
  const MaximinResult r = solve_maximin_exact(g, mo);
  out["status"] = to_string(r.status);
  out["value"] = dec(r.value);
  out["relaxation_bound"] = dec(r.relaxation_bound);
  out["inner_value"] = dec(r.inner_value);
  out["nodes_explored"] = r.nodes_explored;
  out["x"] = x_entries(g, r.x_star, true);
  out["w"] = w_entries(g, r.w_star);
  return out;
}

Json error_json(const EngineError& e) {
  Json err;
  err["code"] = to_string(e.code());
  err["message"] = e.what();
  err["path"] = e.path();
  err["details"] = e.details();
  return Json{{"error", std::move(err)}};
}

}  // namespace engine
