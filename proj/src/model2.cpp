#include "engine/model2.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "engine/errors.hpp"
#include "engine/kernels.hpp"

namespace engine {

std::string_view to_string(GroupKind k) {
  switch (k) {
    case GroupKind::Plus: return "plus";
    case GroupKind::Minus: return "minus";
    case GroupKind::Zero: return "zero";
  }
  return "?";
}

std::string_view to_string(GameClass c) {
  switch (c) {
    case GameClass::Security: return "security";
    case GameClass::Futures: return "futures";
    case GameClass::Option: return "option";
  }
  return "?";
}

namespace {

const char* class_key(GameClass c) {
  switch (c) {
    case GameClass::Security: return "securities";
    case GameClass::Futures: return "futures";
    case GameClass::Option: return "options";
  }
  return "?";
}

double unit_cost(GameClass c, const GameInstrument& g) {
  switch (c) {
    case GameClass::Security: return g.price_now;
    case GameClass::Futures: return g.strike + g.carry;
    case GameClass::Option: return g.carry;
  }
  return 0.0;
}

void validate_class(GameClass c, const ClassInputs& in, std::map<std::string, int>& seen) {
  const std::string base = class_key(c);
  for (double p : {in.p_plus, in.p_minus})
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw EngineError(ErrorCode::InvalidSpec, "group probability must lie in [0, 1]", base + ".probabilities");
  for (std::size_t k = 0; k < in.instruments.size(); ++k) {
    const auto& g = in.instruments[k];
    const std::string path = base + "[" + std::to_string(k) + "]";
    if (g.id.empty()) throw EngineError(ErrorCode::InvalidSpec, "instrument id is empty", path + ".id");
    if (seen[g.id]++) throw EngineError(ErrorCode::InvalidSpec, "duplicate instrument id " + g.id, path + ".id");
    for (double v : {g.price_now, g.price_min, g.price_max, g.holding, g.strike, g.carry})
      if (!std::isfinite(v) || v < 0.0) throw EngineError(ErrorCode::InvalidSpec, "prices, holdings and costs must be finite and nonnegative", path);
    if (!(g.price_min <= g.price_now && g.price_now <= g.price_max))
      throw EngineError(ErrorCode::InvalidSpec, "price box must contain the current price", path);
  }
}

struct Layout {
  GameSpec spec;
  std::map<std::string, std::size_t> x_index;
};

Layout lay_out(const GameInputs& in, bool securities_only, bool with_holdings, bool with_costs) {
  std::map<std::string, int> seen;
  std::vector<std::pair<GameClass, const ClassInputs*>> classes = {{GameClass::Security, &in.securities}};
  if (!securities_only) {
    classes.emplace_back(GameClass::Futures, &in.futures);
    classes.emplace_back(GameClass::Option, &in.options);
  }
  for (auto [c, ci] : classes) validate_class(c, *ci, seen);

  Layout out;
  GameSpec& g = out.spec;
  struct Entry {
    const GameInstrument* inst;
    double p;
    GameClass cls;
  };
  std::vector<Entry> xs;
  std::vector<double> w_lo, w_hi;
  for (auto [c, ci] : classes) {
    for (GroupKind kind : {GroupKind::Plus, GroupKind::Minus, GroupKind::Zero}) {
      std::vector<const GameInstrument*> members;
      for (const auto& inst : ci->instruments)
        if (inst.group == kind) members.push_back(&inst);
      if (members.empty()) continue;
      const double p = kind == GroupKind::Plus ? ci->p_plus : kind == GroupKind::Minus ? ci->p_minus : 0.5;
      GroupBlock blk{c, kind, members.size(), p, xs.size(), w_lo.size()};
      g.blocks.push_back(blk);
      for (const auto* m : members) xs.push_back({m, p, c});
      // y block then z block
      for (int part = 0; part < 2; ++part) {
        for (const auto* m : members) {
          Interval box;
          const bool upper_half = (kind == GroupKind::Plus) == (part == 0);
          box = upper_half ? Interval{m->price_now, m->price_max} : Interval{m->price_min, m->price_now};
          if (part == 0 && m->y_box) box = *m->y_box;
          if (part == 1 && m->z_box) box = *m->z_box;
          w_lo.push_back(box.lo);
          w_hi.push_back(box.hi);
          g.w_names.push_back((part == 0 ? "y[" : "z[") + m->id + "]");
        }
      }
    }
  }

  const std::size_t n = xs.size(), nw = w_lo.size();
  g.payoff_matrix = Matrix(n, nw);
  g.offset_q.assign(nw, 0.0);
  g.cost_K.assign(n, 0.0);
  for (const auto& blk : g.blocks) {
    for (std::size_t k = 0; k < blk.size; ++k) {
      const std::size_t j = blk.x_offset + k;
      const double p = blk.p;
      g.payoff_matrix(j, blk.w_offset + k) = p;
      g.payoff_matrix(j, blk.w_offset + blk.size + k) = 1.0 - p;
      const GameInstrument& inst = *xs[j].inst;
      if (with_holdings) {
        g.offset_q[blk.w_offset + k] = p * inst.holding;
        g.offset_q[blk.w_offset + blk.size + k] = (1.0 - p) * inst.holding;
      }
      if (with_costs && blk.cls != GameClass::Security) g.cost_K[j] = inst.strike + inst.carry;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    g.x_names.push_back(xs[j].inst->id);
    out.x_index[xs[j].inst->id] = j;
  }

  g.exchange_matrix = Matrix(0, nw);
  for (std::size_t k = 0; k < nw; ++k) {
    std::vector<double> r(nw, 0.0);
    r[k] = 1.0;
    g.exchange_matrix.append_row(r);
    g.exchange_rhs.push_back(w_lo[k]);
    r[k] = -1.0;
    g.exchange_matrix.append_row(r);
    g.exchange_rhs.push_back(-w_hi[k]);
  }

  g.trader_matrix = Matrix(0, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> r(n, 0.0);
    r[j] = 1.0;
    g.trader_matrix.append_row(r);
    g.trader_rhs.push_back(0.0);
    g.trader_row_names.push_back("nonneg[" + g.x_names[j] + "]");
  }
  for (std::size_t k = 0; k < in.rows.size(); ++k) {
    const TraderRow& row = in.rows[k];
    std::vector<double> r(n, 0.0);
    for (const auto& [id, c] : row.terms) {
      auto it = out.x_index.find(id);
      if (it == out.x_index.end())
        throw EngineError(ErrorCode::InvalidSpec, "budget row names unknown instrument " + id, "budget_rows[" + std::to_string(k) + "]");
      if (!std::isfinite(c)) throw EngineError(ErrorCode::InvalidSpec, "budget coefficient must be finite", "budget_rows[" + std::to_string(k) + "]");
      r[it->second] += c;
    }
    const std::string name = row.name.empty() ? "row" + std::to_string(k) : row.name;
    auto push = [&](const std::vector<double>& a, double rhs, const std::string& nm) {
      g.trader_matrix.append_row(a);
      g.trader_rhs.push_back(rhs);
      g.trader_row_names.push_back(nm);
    };
    std::vector<double> neg(r);
    for (double& v : neg) v = -v;
    switch (row.sense) {
      case RowSense::GreaterEqual: push(r, row.rhs, name); break;
      case RowSense::LessEqual: push(neg, -row.rhs, name); break;
      case RowSense::Equal:
        push(r, row.rhs, name + "_ge");
        push(neg, -row.rhs, name + "_le");
        break;
    }
  }
  g.integer_mask = IntegerMask::all(n);
  return out;
}

LinearProgram exchange_feasibility(const GameSpec& g) {
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  for (std::size_t k = 0; k < g.num_w(); ++k) lp.add_variable(0.0);
  for (std::size_t i = 0; i < g.exchange_matrix.rows(); ++i)
    lp.add_row(std::vector<double>(g.exchange_matrix.row(i), g.exchange_matrix.row(i) + g.num_w()), RowSense::GreaterEqual, g.exchange_rhs[i]);
  return lp;
}

LinearProgram trader_feasibility(const GameSpec& g) {
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  for (std::size_t j = 0; j < g.num_x(); ++j) lp.add_variable(0.0);
  for (std::size_t i = 0; i < g.trader_matrix.rows(); ++i)
    lp.add_row(std::vector<double>(g.trader_matrix.row(i), g.trader_matrix.row(i) + g.num_x()), RowSense::GreaterEqual, g.trader_rhs[i]);
  return lp;
}

void check_dimensions(const GameSpec& g) {
  const std::size_t n = g.num_x(), nw = g.num_w();
  if (g.trader_matrix.cols() != n || g.trader_matrix.rows() != g.trader_rhs.size() || g.exchange_matrix.cols() != nw ||
      g.exchange_matrix.rows() != g.exchange_rhs.size() || g.offset_q.size() != nw || g.cost_K.size() != n || g.integer_mask.size() != n)
    throw EngineError(ErrorCode::DimensionMismatch, "game matrices are not dimensioned consistently");
}

void preflight(const GameSpec& g) {
  check_dimensions(g);
  if (solve_lp(exchange_feasibility(g)).status != LpStatus::Optimal)
    throw EngineError(ErrorCode::EmptyExchangePolyhedron, "the exchange price polyhedron is empty", "game_inputs.groups");
}

GameSpec finish(Layout&& l) {
  preflight(l.spec);
  if (solve_lp(trader_feasibility(l.spec)).status != LpStatus::Optimal)
    throw EngineError(ErrorCode::IncompatibleBudget, "the budget rows admit no nonnegative trader vector", "game_inputs.budget_rows");
  return std::move(l.spec);
}

}  // namespace

TraderRow cash_budget_row(const GameInputs& in, double cash, const std::vector<std::pair<std::string, double>>& borrows, std::string name) {
  TraderRow row;
  row.name = std::move(name);
  std::map<std::string, double> price;
  for (auto [c, ci] : {std::pair{GameClass::Security, &in.securities}, std::pair{GameClass::Futures, &in.futures},
                       std::pair{GameClass::Option, &in.options}})
    for (const auto& g : ci->instruments) {
      price[g.id] = unit_cost(c, g);
      row.terms.emplace_back(g.id, -unit_cost(c, g));
    }
  double available = cash;
  for (const auto& [id, units] : borrows) {
    auto it = price.find(id);
    if (it == price.end()) throw EngineError(ErrorCode::InvalidSpec, "borrowed instrument " + id + " is not listed", "game_inputs.short_borrows");
    if (!(units >= 0)) throw EngineError(ErrorCode::InvalidSpec, "borrowed units must be nonnegative", "game_inputs.short_borrows");
    available += units * it->second;
  }
  row.rhs = -available;
  return row;
}

GameSpec build_game(const GameInputs& in) { return finish(lay_out(in, true, false, false)); }

GameSpec build_game_with_holdings(const GameInputs& in) { return finish(lay_out(in, true, true, false)); }

GameSpec build_derivative_game(const GameInputs& in) { return finish(lay_out(in, false, true, true)); }

double evaluate_payoff(const GameSpec& g, const std::vector<double>& x, const std::vector<double>& w) {
  if (x.size() != g.num_x() || w.size() != g.num_w()) throw EngineError(ErrorCode::DimensionMismatch, "strategy dimensions do not match the game");
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) v += x[j] * kernels::dot(g.payoff_matrix.row(j), w.data(), w.size());
  v -= kernels::dot(g.cost_K.data(), x.data(), x.size());
  v += kernels::dot(g.offset_q.data(), w.data(), w.size());
  return v;
}

LinearProgram upper_bound_lp(const GameSpec& g) {
  check_dimensions(g);
  const std::size_t n = g.num_x(), nw = g.num_w(), na = g.exchange_matrix.rows();
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  for (std::size_t i = 0; i < na; ++i) lp.add_variable(g.exchange_rhs[i], 0.0, kInf, "h" + std::to_string(i + 1));
  for (std::size_t j = 0; j < n; ++j) lp.add_variable(-g.cost_K[j], 0.0, kInf, "x[" + g.x_names[j] + "]");
  for (std::size_t i = 0; i < g.trader_matrix.rows(); ++i) {
    std::vector<double> r(na + n, 0.0);
    for (std::size_t j = 0; j < n; ++j) r[na + j] = g.trader_matrix(i, j);
    lp.add_row(r, RowSense::GreaterEqual, g.trader_rhs[i], g.trader_row_names[i]);
  }
  for (std::size_t k = 0; k < nw; ++k) {
    std::vector<double> r(na + n, 0.0);
    for (std::size_t i = 0; i < na; ++i) r[i] = g.exchange_matrix(i, k);
    for (std::size_t j = 0; j < n; ++j) r[na + j] = -g.payoff_matrix(j, k);
    lp.add_row(r, RowSense::LessEqual, g.offset_q[k], g.w_names[k]);
  }
  return lp;
}

LinearProgram exchange_dual_lp(const GameSpec& g) {
  check_dimensions(g);
  const std::size_t n = g.num_x(), nw = g.num_w(), nb = g.trader_matrix.rows();
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  for (std::size_t i = 0; i < nb; ++i) lp.add_variable(-g.trader_rhs[i], 0.0, kInf, "pi[" + g.trader_row_names[i] + "]");
  for (std::size_t k = 0; k < nw; ++k) lp.add_variable(g.offset_q[k], 0.0, kInf, g.w_names[k]);
  for (std::size_t i = 0; i < g.exchange_matrix.rows(); ++i) {
    std::vector<double> r(nb + nw, 0.0);
    for (std::size_t k = 0; k < nw; ++k) r[nb + k] = g.exchange_matrix(i, k);
    lp.add_row(r, RowSense::GreaterEqual, g.exchange_rhs[i], "A" + std::to_string(i + 1));
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> r(nb + nw, 0.0);
    for (std::size_t i = 0; i < nb; ++i) r[i] = g.trader_matrix(i, j);
    for (std::size_t k = 0; k < nw; ++k) r[nb + k] = g.payoff_matrix(j, k);
    lp.add_row(r, RowSense::LessEqual, g.cost_K[j], "x[" + g.x_names[j] + "]");
  }
  return lp;
}

InnerSolution inner_minimum(const GameSpec& g, const std::vector<double>& x) {
  if (x.size() != g.num_x()) throw EngineError(ErrorCode::DimensionMismatch, "trader vector length does not match the game");
  LinearProgram lp = exchange_feasibility(g);
  for (std::size_t k = 0; k < g.num_w(); ++k) {
    double c = g.offset_q[k];
    for (std::size_t j = 0; j < x.size(); ++j) c += x[j] * g.payoff_matrix(j, k);
    lp.objective[k] = c;
  }
  lp.objective_offset = -kernels::dot(g.cost_K.data(), x.data(), x.size());
  const LpOutcome out = solve_lp(lp);
  if (out.status == LpStatus::Infeasible) throw EngineError(ErrorCode::EmptyExchangePolyhedron, "the exchange price polyhedron is empty");
  if (out.status != LpStatus::Optimal) throw EngineError(ErrorCode::Unbounded, "the exchange can drive the payoff to minus infinity");
  return {*out.objective_value, *out.primal};
}

namespace {

std::vector<double> slice(const std::vector<double>& v, std::size_t from, std::size_t count) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(from + count)};
}

[[noreturn]] void trader_infeasible() {
  throw EngineError(ErrorCode::TraderPolyhedronInfeasible, "no trader strategy satisfies the budget rows", "game_inputs.budget_rows");
}

}  // namespace

SaddlePointResult solve_maximin_upper_bound(const GameSpec& g) {
  preflight(g);
  const std::size_t na = g.exchange_matrix.rows(), nb = g.trader_matrix.rows(), n = g.num_x(), nw = g.num_w();
  const LinearProgram q = upper_bound_lp(g);
  const LpOutcome primal = solve_lp(q);
  if (primal.status == LpStatus::Infeasible) trader_infeasible();
  if (primal.status == LpStatus::Unbounded) throw EngineError(ErrorCode::Unbounded, "the guaranteed result is unbounded over the trader polyhedron");

  SaddlePointResult res;
  res.h_star = slice(*primal.primal, 0, na);
  res.x_star = slice(*primal.primal, na, n);
  res.value = *primal.objective_value;

  // The exchange's optimal scenario is generally not unique; among optimal
  // (pi, w) take the one with the smallest component sum.
  const LinearProgram p = exchange_dual_lp(g);
  const LpOutcome dual = solve_lp(p);
  if (dual.status != LpStatus::Optimal) throw EngineError(ErrorCode::NumericalFailure, "the exchange LP of the pair did not solve");
  LinearProgram tie = p;
  tie.add_row(p.objective, RowSense::LessEqual, *dual.objective_value + 1e-9 * std::max(1.0, std::abs(*dual.objective_value)), "value_pin");
  std::fill(tie.objective.begin(), tie.objective.end(), 1.0);
  const LpOutcome picked = solve_lp(tie);
  const std::vector<double>& sol = picked.status == LpStatus::Optimal ? *picked.primal : *dual.primal;
  res.pi_star = slice(sol, 0, nb);
  res.w_star = slice(sol, nb, nw);
  res.dual_value = p.evaluate(sol);
  return res;
}

MaximinResult solve_maximin_exact(const GameSpec& g, const MilpOptions& options) {
  preflight(g);
  const std::size_t na = g.exchange_matrix.rows(), n = g.num_x();
  const LinearProgram q = upper_bound_lp(g);
  IntegerMask mask = IntegerMask::none(na + n);
  for (std::size_t j = 0; j < n; ++j) mask.flags[na + j] = g.integer_mask[j];
  MilpOptions opts = options;
  if (opts.lexicographic.empty())
    for (std::size_t j = 0; j < n; ++j) opts.lexicographic.push_back(na + j);

  const LpOutcome relax = solve_lp(q);
  if (relax.status == LpStatus::Infeasible) trader_infeasible();
  if (relax.status == LpStatus::Unbounded) throw EngineError(ErrorCode::Unbounded, "the guaranteed result is unbounded over the trader polyhedron");

  const MilpOutcome out = solve_milp(q, mask, opts);
  if (out.status == MilpStatus::Infeasible) trader_infeasible();
  if (out.status == MilpStatus::Unbounded) throw EngineError(ErrorCode::Unbounded, "the guaranteed result is unbounded over the trader polyhedron");
  if (!out.solution) throw EngineError(ErrorCode::NumericalFailure, "node limit reached before an integer trader strategy was found");

  MaximinResult res;
  res.status = out.status;
  res.nodes_explored = out.nodes_explored;
  res.relaxation_bound = *relax.objective_value;
  res.z_star = slice(*out.solution, 0, na);
  res.x_star = slice(*out.solution, na, n);
  for (std::size_t j = 0; j < n; ++j)
    if (g.integer_mask[j]) res.x_star[j] = std::round(res.x_star[j]);
  res.value = *out.objective_value;
  const InnerSolution inner = inner_minimum(g, res.x_star);
  res.inner_value = inner.value;
  res.w_star = inner.w;
  if (std::abs(inner.value - res.value) > 1e-6 * std::max(1.0, std::abs(res.value)))
    throw EngineError(ErrorCode::NumericalFailure, "inner minimum at the integer strategy disagrees with the mixed program value");
  return res;
}

}  // namespace engine
