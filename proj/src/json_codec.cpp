#include <charconv>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>

#include "engine/errors.hpp"
#include "engine/scenario.hpp"

namespace engine {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw EngineError(ErrorCode::ValidationError, msg, path);
}

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const Json& object(const Json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
  return j;
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array");
  return j;
}

void only_keys(const Json& j, const std::string& path, std::initializer_list<const char*> keys) {
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) invalid(join(path, it.key()), "unknown field");
}

const Json& field(const Json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) invalid(join(path, key), "required field is missing");
  return *it;
}

double num(const Json& j, const std::string& path, const char* key) { return parse_decimal(field(j, path, key), join(path, key)); }

double num_or(const Json& j, const std::string& path, const char* key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : parse_decimal(*it, join(path, key));
}

std::string str(const Json& j, const std::string& path, const char* key) {
  const Json& v = field(j, path, key);
  if (!v.is_string()) invalid(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::string str_or(const Json& j, const std::string& path, const char* key, std::string fallback) {
  return j.contains(key) ? str(j, path, key) : fallback;
}

std::int64_t integer(const Json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && p == s.data() + s.size()) return out;
  }
  invalid(path, "expected an integer");
}

Direction parse_direction(const std::string& s, const std::string& path) {
  if (s == "increase") return Direction::Increase;
  if (s == "decrease") return Direction::Decrease;
  if (s == "no_change") return Direction::NoChange;
  invalid(path, "direction must be increase, decrease or no_change");
}

const char* direction_key(Direction d) {
  switch (d) {
    case Direction::Increase: return "increase";
    case Direction::Decrease: return "decrease";
    case Direction::NoChange: return "no_change";
  }
  return "no_change";
}

GroupKind parse_group(const std::string& s, const std::string& path) {
  if (s == "plus") return GroupKind::Plus;
  if (s == "minus") return GroupKind::Minus;
  if (s == "zero") return GroupKind::Zero;
  invalid(path, "group must be plus, minus or zero");
}

const char* group_key(GroupKind g) {
  switch (g) {
    case GroupKind::Plus: return "plus";
    case GroupKind::Minus: return "minus";
    case GroupKind::Zero: return "zero";
  }
  return "zero";
}

RowSense parse_sense(const std::string& s, const std::string& path) {
  if (s == "<=") return RowSense::LessEqual;
  if (s == ">=") return RowSense::GreaterEqual;
  if (s == "=") return RowSense::Equal;
  invalid(path, "sense must be <=, >= or =");
}

const char* sense_key(RowSense s) {
  switch (s) {
    case RowSense::LessEqual: return "<=";
    case RowSense::GreaterEqual: return ">=";
    case RowSense::Equal: return "=";
  }
  return "=";
}

const char* situation_key(GameSituation s) {
  switch (s) {
    case GameSituation::NoHoldings: return "no_holdings";
    case GameSituation::Holdings: return "holdings";
    case GameSituation::Derivatives: return "derivatives";
  }
  return "holdings";
}

SecurityBelief read_belief(const Json& j, const std::string& path) {
  SecurityBelief b;
  b.price_now = num(j, path, "price_now");
  b.direction = parse_direction(str(j, path, "direction"), join(path, "direction"));
  b.p = num(j, path, "p");
  b.price_min = num(j, path, "price_min");
  b.price_max = num(j, path, "price_max");
  return b;
}

void write_belief(Json& o, const SecurityBelief& b) {
  o["price_now"] = format_decimal(b.price_now);
  o["direction"] = direction_key(b.direction);
  o["p"] = format_decimal(b.p);
  o["price_min"] = format_decimal(b.price_min);
  o["price_max"] = format_decimal(b.price_max);
}

std::vector<std::pair<std::string, double>> read_terms(const Json& j, const std::string& path) {
  object(j, path);
  std::vector<std::pair<std::string, double>> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.emplace_back(it.key(), parse_decimal(it.value(), join(path, it.key())));
  return out;
}

Json write_terms(const std::vector<std::pair<std::string, double>>& terms) {
  Json o = Json::object();
  for (const auto& [k, v] : terms) o[k] = format_decimal(v);
  return o;
}

std::optional<Interval> read_box(const Json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  const std::string p = join(path, key);
  if (!it->is_array() || it->size() != 2) invalid(p, "expected [lo, hi]");
  return Interval{parse_decimal((*it)[0], index(p, 0)), parse_decimal((*it)[1], index(p, 1))};
}

void read_class(const Json& groups, const Json* probs, const char* key, bool derivative, ClassInputs& out) {
  const std::string gpath = join("game_inputs.groups", key);
  if (auto it = groups.find(key); it != groups.end()) {
    array(*it, gpath);
    for (std::size_t k = 0; k < it->size(); ++k) {
      const Json& g = (*it)[k];
      const std::string p = index(gpath, k);
      object(g, p);
      if (derivative)
        only_keys(g, p, {"id", "group", "price_now", "price_min", "price_max", "holding", "strike", "carry", "y_box", "z_box"});
      else
        only_keys(g, p, {"id", "group", "price_now", "price_min", "price_max", "holding", "y_box", "z_box"});
      GameInstrument gi;
      gi.id = str(g, p, "id");
      gi.group = parse_group(str(g, p, "group"), join(p, "group"));
      gi.price_now = num(g, p, "price_now");
      gi.price_min = num(g, p, "price_min");
      gi.price_max = num(g, p, "price_max");
      gi.holding = num_or(g, p, "holding", 0.0);
      gi.strike = num_or(g, p, "strike", 0.0);
      gi.carry = num_or(g, p, "carry", 0.0);
      gi.y_box = read_box(g, p, "y_box");
      gi.z_box = read_box(g, p, "z_box");
      out.instruments.push_back(std::move(gi));
    }
  }
  if (probs) {
    if (auto it = probs->find(key); it != probs->end()) {
      const std::string p = join("game_inputs.probabilities", key);
      object(*it, p);
      only_keys(*it, p, {"plus", "minus"});
      out.p_plus = num_or(*it, p, "plus", 0.5);
      out.p_minus = num_or(*it, p, "minus", 0.5);
    }
  }
}

Json write_class(const ClassInputs& c, bool derivative) {
  Json arr = Json::array();
  for (const auto& g : c.instruments) {
    Json o;
    o["id"] = g.id;
    o["group"] = group_key(g.group);
    o["price_now"] = format_decimal(g.price_now);
    o["price_min"] = format_decimal(g.price_min);
    o["price_max"] = format_decimal(g.price_max);
    o["holding"] = format_decimal(g.holding);
    if (derivative) {
      o["strike"] = format_decimal(g.strike);
      o["carry"] = format_decimal(g.carry);
    }
    if (g.y_box) o["y_box"] = Json::array({format_decimal(g.y_box->lo), format_decimal(g.y_box->hi)});
    if (g.z_box) o["z_box"] = Json::array({format_decimal(g.z_box->lo), format_decimal(g.z_box->hi)});
    arr.push_back(std::move(o));
  }
  return arr;
}

GameSection read_game(const Json& j) {
  const std::string path = "game_inputs";
  object(j, path);
  only_keys(j, path, {"situation", "groups", "probabilities", "budget_rows"});
  GameSection g;
  const Json empty = Json::object();
  const Json& groups = j.contains("groups") ? object(j["groups"], join(path, "groups")) : empty;
  only_keys(groups, join(path, "groups"), {"securities", "futures", "options"});
  const Json* probs = nullptr;
  if (j.contains("probabilities")) {
    probs = &object(j["probabilities"], join(path, "probabilities"));
    only_keys(*probs, join(path, "probabilities"), {"securities", "futures", "options"});
  }
  read_class(groups, probs, "securities", false, g.inputs.securities);
  read_class(groups, probs, "futures", true, g.inputs.futures);
  read_class(groups, probs, "options", true, g.inputs.options);

  const bool derivatives = !g.inputs.futures.instruments.empty() || !g.inputs.options.instruments.empty();
  const std::string sit = str_or(j, path, "situation", derivatives ? "derivatives" : "holdings");
  if (sit == "no_holdings") g.situation = GameSituation::NoHoldings;
  else if (sit == "holdings") g.situation = GameSituation::Holdings;
  else if (sit == "derivatives") g.situation = GameSituation::Derivatives;
  else invalid(join(path, "situation"), "situation must be no_holdings, holdings or derivatives");
  if (derivatives && g.situation != GameSituation::Derivatives)
    invalid(join(path, "situation"), "futures or options groups need situation derivatives");

  if (j.contains("budget_rows")) {
    const std::string bp = join(path, "budget_rows");
    const Json& rows = array(j["budget_rows"], bp);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::string p = index(bp, k);
      const Json& r = object(rows[k], p);
      BudgetRow row;
      const std::string kind = str_or(r, p, "kind", "cash");
      row.name = str_or(r, p, "name", kind == "cash" ? "cash" : "row" + std::to_string(k));
      if (kind == "cash") {
        only_keys(r, p, {"kind", "name", "cash", "borrows"});
        row.kind = BudgetRow::Kind::Cash;
        row.cash = num(r, p, "cash");
        if (r.contains("borrows")) row.borrows = read_terms(r["borrows"], join(p, "borrows"));
      } else if (kind == "linear") {
        only_keys(r, p, {"kind", "name", "terms", "sense", "rhs"});
        row.kind = BudgetRow::Kind::Linear;
        row.terms = read_terms(field(r, p, "terms"), join(p, "terms"));
        row.sense = parse_sense(str(r, p, "sense"), join(p, "sense"));
        row.rhs = num(r, p, "rhs");
      } else {
        invalid(join(p, "kind"), "kind must be cash or linear");
      }
      g.budget_rows.push_back(std::move(row));
    }
  }
  return g;
}

Json write_game(const GameSection& g) {
  Json o;
  o["situation"] = situation_key(g.situation);
  Json probs, groups;
  const std::pair<const char*, const ClassInputs*> classes[] = {
      {"securities", &g.inputs.securities}, {"futures", &g.inputs.futures}, {"options", &g.inputs.options}};
  for (const auto& [key, c] : classes) {
    probs[key] = Json{{"plus", format_decimal(c->p_plus)}, {"minus", format_decimal(c->p_minus)}};
    groups[key] = write_class(*c, c != &g.inputs.securities);
  }
  o["probabilities"] = std::move(probs);
  o["groups"] = std::move(groups);
  Json rows = Json::array();
  for (const auto& r : g.budget_rows) {
    Json jr;
    jr["kind"] = r.kind == BudgetRow::Kind::Cash ? "cash" : "linear";
    jr["name"] = r.name;
    if (r.kind == BudgetRow::Kind::Cash) {
      jr["cash"] = format_decimal(r.cash);
      jr["borrows"] = write_terms(r.borrows);
    } else {
      jr["terms"] = write_terms(r.terms);
      jr["sense"] = sense_key(r.sense);
      jr["rhs"] = format_decimal(r.rhs);
    }
    rows.push_back(std::move(jr));
  }
  o["budget_rows"] = std::move(rows);
  return o;
}

}  // namespace

std::string format_decimal(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

double parse_decimal(const Json& j, const std::string& path) {
  double v = 0.0;
  if (j.is_number()) {
    v = j.get<double>();
  } else if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) invalid(path, "expected a decimal number, got '" + s + "'");
  } else {
    invalid(path, "expected a decimal string");
  }
  if (!std::isfinite(v)) invalid(path, "value must be finite");
  return v;
}

std::string format_instant(std::int64_t micros) {
  const std::int64_t secs = micros >= 0 ? micros / 1000000 : (micros - 999999) / 1000000;
  const std::int64_t frac = micros - secs * 1000000;
  std::string base = format_timestamp(secs);
  base.pop_back();  // Z
  char buf[16];
  std::snprintf(buf, sizeof buf, ".%06lldZ", static_cast<long long>(frac));
  return base + buf;
}

std::int64_t parse_instant(const std::string& text, const std::string& path) {
  std::string head = text;
  std::int64_t frac = 0;
  if (auto dot = text.find('.'); dot != std::string::npos) {
    std::string digits = text.substr(dot + 1);
    if (!digits.empty() && digits.back() == 'Z') digits.pop_back();
    if (digits.empty() || digits.size() > 6 || digits.find_first_not_of("0123456789") != std::string::npos)
      invalid(path, "bad fractional seconds in '" + text + "'");
    digits.resize(6, '0');
    frac = std::stoll(digits);
    head = text.substr(0, dot) + "Z";
  }
  try {
    return parse_timestamp(head) * 1000000 + frac;
  } catch (const EngineError&) {
    invalid(path, "bad instant '" + text + "'");
  }
}

Scenario scenario_from_json(const Json& j) {
  object(j, "");
  only_keys(j, "", {"schema_version", "id", "name", "trader_state", "beliefs", "futures", "options", "game_inputs", "series",
                    "created_at", "updated_at"});
  Scenario s;
  if (j.contains("schema_version")) {
    s.schema_version = static_cast<int>(integer(j["schema_version"], "schema_version"));
    if (s.schema_version != kSchemaVersion) invalid("schema_version", "unsupported schema_version");
  }
  s.id = str_or(j, "", "id", "");
  s.name = str_or(j, "", "name", "");

  if (j.contains("trader_state")) {
    const std::string p = "trader_state";
    const Json& t = object(j["trader_state"], p);
    only_keys(t, p, {"cash", "holdings", "leverage", "threshold"});
    s.trader.cash = num_or(t, p, "cash", 0.0);
    s.trader.leverage = num_or(t, p, "leverage", 0.0);
    s.trader.threshold = num_or(t, p, "threshold", 1.0);
    if (t.contains("holdings")) {
      const Json& h = object(t["holdings"], join(p, "holdings"));
      for (auto it = h.begin(); it != h.end(); ++it)
        s.trader.holdings[it.key()] = integer(it.value(), join(join(p, "holdings"), it.key()));
    }
  }

  if (j.contains("beliefs")) {
    const Json& arr = array(j["beliefs"], "beliefs");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string p = index("beliefs", k);
      object(arr[k], p);
      only_keys(arr[k], p, {"id", "price_now", "direction", "p", "price_min", "price_max"});
      s.beliefs.push_back({str(arr[k], p, "id"), read_belief(arr[k], p)});
    }
  }
  if (j.contains("futures")) {
    const Json& arr = array(j["futures"], "futures");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string p = index("futures", k);
      const Json& f = object(arr[k], p);
      only_keys(f, p, {"id", "strike", "carry_cost", "side", "held", "price_now", "direction", "p", "price_min", "price_max"});
      NamedFutures nf;
      nf.id = str(f, p, "id");
      nf.spec.strike_basis = num(f, p, "strike");
      nf.spec.carry_cost = num_or(f, p, "carry_cost", 0.0);
      const std::string side = str_or(f, p, "side", "buy");
      if (side != "buy" && side != "sell") invalid(join(p, "side"), "side must be buy or sell");
      nf.spec.side = side == "buy" ? FuturesSide::Buy : FuturesSide::Sell;
      nf.spec.held_volume = f.contains("held") ? integer(f["held"], join(p, "held")) : 0;
      nf.spec.belief = read_belief(f, p);
      s.futures.push_back(std::move(nf));
    }
  }
  if (j.contains("options")) {
    const Json& arr = array(j["options"], "options");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string p = index("options", k);
      const Json& o = object(arr[k], p);
      only_keys(o, p, {"id", "strike", "premium", "kind", "held", "price_now", "direction", "p", "price_min", "price_max"});
      NamedOption no;
      no.id = str(o, p, "id");
      no.spec.strike = num(o, p, "strike");
      no.spec.premium = num(o, p, "premium");
      const std::string kind = str_or(o, p, "kind", "call");
      if (kind != "call" && kind != "put") invalid(join(p, "kind"), "kind must be call or put");
      no.spec.kind = kind == "call" ? OptionKind::Call : OptionKind::Put;
      no.spec.held_volume = o.contains("held") ? integer(o["held"], join(p, "held")) : 0;
      no.spec.belief = read_belief(o, p);
      s.options.push_back(std::move(no));
    }
  }
  if (j.contains("game_inputs") && !j["game_inputs"].is_null()) s.game = read_game(j["game_inputs"]);

  if (j.contains("series")) {
    const Json& arr = array(j["series"], "series");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string p = index("series", k);
      const Json& o = object(arr[k], p);
      only_keys(o, p, {"instrument_id", "points"});
      TimeSeries ts;
      ts.instrument_id = str(o, p, "instrument_id");
      const Json& pts = array(field(o, p, "points"), join(p, "points"));
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string pp = index(join(p, "points"), i);
        object(pts[i], pp);
        only_keys(pts[i], pp, {"t", "price"});
        try {
          ts.timestamps.push_back(parse_timestamp(str(pts[i], pp, "t")));
        } catch (const EngineError& e) {
          if (e.code() != ErrorCode::ValidationError || e.path() != "timestamp") throw;
          invalid(join(pp, "t"), e.what());
        }
        ts.prices.push_back(num(pts[i], pp, "price"));
      }
      s.series.push_back(std::move(ts));
    }
  }
  if (j.contains("created_at")) s.created_at = parse_instant(str(j, "", "created_at"), "created_at");
  if (j.contains("updated_at")) s.updated_at = parse_instant(str(j, "", "updated_at"), "updated_at");
  return s;
}

Json scenario_to_json(const Scenario& s) {
  Json o;
  o["schema_version"] = s.schema_version;
  o["id"] = s.id;
  o["name"] = s.name;
  Json t;
  t["cash"] = format_decimal(s.trader.cash);
  Json h = Json::object();
  for (const auto& [k, v] : s.trader.holdings) h[k] = v;
  t["holdings"] = std::move(h);
  t["leverage"] = format_decimal(s.trader.leverage);
  t["threshold"] = format_decimal(s.trader.threshold);
  o["trader_state"] = std::move(t);

  Json beliefs = Json::array();
  for (const auto& b : s.beliefs) {
    Json jb;
    jb["id"] = b.id;
    write_belief(jb, b.belief);
    beliefs.push_back(std::move(jb));
  }
  o["beliefs"] = std::move(beliefs);
  Json futures = Json::array();
  for (const auto& f : s.futures) {
    Json jf;
    jf["id"] = f.id;
    jf["strike"] = format_decimal(f.spec.strike_basis);
    jf["carry_cost"] = format_decimal(f.spec.carry_cost);
    jf["side"] = f.spec.side == FuturesSide::Buy ? "buy" : "sell";
    jf["held"] = f.spec.held_volume;
    write_belief(jf, f.spec.belief);
    futures.push_back(std::move(jf));
  }
  o["futures"] = std::move(futures);
  Json options = Json::array();
  for (const auto& op : s.options) {
    Json jo;
    jo["id"] = op.id;
    jo["strike"] = format_decimal(op.spec.strike);
    jo["premium"] = format_decimal(op.spec.premium);
    jo["kind"] = op.spec.kind == OptionKind::Call ? "call" : "put";
    jo["held"] = op.spec.held_volume;
    write_belief(jo, op.spec.belief);
    options.push_back(std::move(jo));
  }
  o["options"] = std::move(options);
  o["game_inputs"] = s.game ? write_game(*s.game) : Json();
  Json series = Json::array();
  for (const auto& ts : s.series) {
    Json pts = Json::array();
    for (std::size_t i = 0; i < ts.size(); ++i)
      pts.push_back(Json{{"t", format_timestamp(ts.timestamps[i])}, {"price", format_decimal(ts.prices[i])}});
    series.push_back(Json{{"instrument_id", ts.instrument_id}, {"points", std::move(pts)}});
  }
  o["series"] = std::move(series);
  o["created_at"] = format_instant(s.created_at);
  o["updated_at"] = format_instant(s.updated_at);
  return o;
}

}  // namespace engine
