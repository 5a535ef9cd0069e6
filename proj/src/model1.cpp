#include "engine/model1.hpp"

#include <algorithm>
#include <cmath>

#include "engine/errors.hpp"

namespace engine {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Buy: return "buy";
    case Role::Sell: return "sell";
    case Role::ShortBorrow: return "short_borrow";
    case Role::FuturesVolume: return "futures_volume";
    case Role::FuturesShortBorrow: return "futures_short_borrow";
    case Role::OptionsVolume: return "options_volume";
  }
  return "?";
}

std::string_view to_string(InstrumentClass c) {
  switch (c) {
    case InstrumentClass::Security: return "security";
    case InstrumentClass::Futures: return "futures";
    case InstrumentClass::Option: return "option";
  }
  return "?";
}

std::string_view to_string(SolveMode m) { return m == SolveMode::Exact ? "Exact" : "Rounded"; }

double TraderState::welfare(std::span<const SecurityBelief> beliefs) const {
  double w = cash;
  for (const auto& [i, v] : holdings) {
    if (i >= beliefs.size()) throw EngineError(ErrorCode::MissingBelief, "held security " + std::to_string(i) + " has no belief");
    w += static_cast<double>(v) * beliefs[i].price_now;
  }
  return w;
}

void TraderState::validate() const {
  if (!std::isfinite(cash) || cash < 0) throw EngineError(ErrorCode::InvalidSpec, "cash must be nonnegative", "trader_state.cash");
  if (!std::isfinite(leverage) || leverage < 0)
    throw EngineError(ErrorCode::InvalidSpec, "leverage must be nonnegative", "trader_state.leverage");
  if (!std::isfinite(threshold) || threshold <= 0)
    throw EngineError(ErrorCode::InvalidSpec, "threshold must be positive", "trader_state.threshold");
  for (const auto& [i, v] : holdings)
    if (v < 0) throw EngineError(ErrorCode::InvalidSpec, "holdings must be nonnegative", "trader_state.holdings");
}

const NamedRow* ProblemInstance::row(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return &r;
  return nullptr;
}

namespace {

// Accumulates one instance: variables with their welfare and leverage
// coefficients, plus constants for the objective and both main rows.
struct Builder {
  ProblemInstance inst;
  std::vector<double> welfare_coef;
  std::vector<double> leverage_coef;
  double welfare_const = 0.0;   // added to the left side of the welfare row
  double leverage_const = 0.0;  // added to the left side of the leverage row
  std::vector<std::pair<std::size_t, double>> caps;  // variable, upper bound row

  std::size_t add(VariableRole role, double objective, double welfare, double leverage, const std::string& name) {
    const std::size_t j = inst.lp.add_variable(objective, 0.0, kInf, name);
    inst.variable_map.push_back(role);
    welfare_coef.push_back(welfare);
    leverage_coef.push_back(leverage);
    return j;
  }

  void add_row(const std::string& name, std::vector<double> coeffs, RowSense sense, double constant, double bound) {
    const std::size_t r = inst.lp.num_rows();
    inst.lp.add_row(coeffs, sense, bound - constant, name);
    inst.rows.push_back({name, r, constant, bound, sense});
  }

  ProblemInstance finish(double alpha, double leverage, double welfare_now) {
    const std::size_t n = inst.lp.num_cols();
    inst.welfare_now = welfare_now;
    add_row("welfare_threshold", welfare_coef, RowSense::GreaterEqual, welfare_const, alpha * welfare_now);
    add_row("leverage", leverage_coef, RowSense::LessEqual, leverage_const, leverage * welfare_now);
    for (const auto& [j, cap] : caps) {
      std::vector<double> a(n, 0.0);
      a[j] = 1.0;
      add_row("short_cap[" + inst.lp.col_names[j] + "]", a, RowSense::LessEqual, 0.0, cap);
    }
    inst.mask = IntegerMask::all(n);
    return std::move(inst);
  }
};

void check_holdings(const Holdings& h, std::size_t n, const char* what) {
  for (const auto& [i, v] : h)
    if (i >= n) throw EngineError(ErrorCode::MissingBelief, std::string(what) + " " + std::to_string(i) + " is held but has no belief");
}

void check_cover(const Partition& part, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto* set : {&part.plus, &part.minus, &part.zero})
    for (std::size_t i : *set) {
      if (i >= n) throw EngineError(ErrorCode::InconsistentPartition, "partition names unknown index " + std::to_string(i));
      ++seen[i];
    }
  for (std::size_t i = 0; i < n; ++i)
    if (seen[i] != 1) throw EngineError(ErrorCode::InconsistentPartition, "index " + std::to_string(i) + " must lie in exactly one of I+, I-, I0");
}

void check_hat(const Partition& part) {
  auto subset = [](const std::vector<std::size_t>& sub, const std::vector<std::size_t>& sup) {
    return std::all_of(sub.begin(), sub.end(), [&](std::size_t i) { return std::find(sup.begin(), sup.end(), i) != sup.end(); });
  };
  if (!subset(part.hat_plus, part.plus) || !subset(part.hat_minus, part.minus) || !subset(part.hat_zero, part.zero))
    throw EngineError(ErrorCode::InconsistentPartition, "hat sets must be subsets of their direction sets");
}

std::string label(const char* prefix, std::size_t i) { return std::string(prefix) + "[" + std::to_string(i) + "]"; }

double held(const Holdings& h, std::size_t i) {
  auto it = h.find(i);
  return it == h.end() ? 0.0 : static_cast<double>(it->second);
}

std::vector<double> expectations(std::span<const SecurityBelief> beliefs, double discount) {
  std::vector<double> ms(beliefs.size());
  for (std::size_t i = 0; i < beliefs.size(); ++i) ms[i] = discount * expected_price(beliefs[i]);
  return ms;
}

// Securities part of problems 2 and 4.
void add_securities(Builder& b, const TraderState& state, std::span<const SecurityBelief> beliefs, const Partition& part,
                    const std::vector<double>& ms) {
  const std::size_t n = beliefs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!part.in_hat(i)) continue;
    const double s = beliefs[i].price_now;
    b.add({Role::Buy, InstrumentClass::Security, i}, ms[i] - s, ms[i] - s, s, label("x_plus", i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (part.in_hat(i)) continue;
    const double s = beliefs[i].price_now;
    b.add({Role::ShortBorrow, InstrumentClass::Security, i}, s - ms[i], s - ms[i], s, label("z_minus", i));
  }
  for (const auto& [i, v] : state.holdings) {
    if (v == 0) continue;
    const double s = beliefs[i].price_now, vv = static_cast<double>(v);
    if (ms[i] - s > kPositiveTol) {
      b.inst.lp.objective_offset += vv * (ms[i] - s);
      b.welfare_const += vv * ms[i];
    } else {
      b.welfare_const += vv * s;
      b.leverage_const -= vv * s;
    }
  }
}

}  // namespace

ProblemInstance build_problem1(const TraderState& state, std::span<const SecurityBelief> beliefs, const Partition& partition,
                               const BuildOptions& options) {
  state.validate();
  const std::size_t n = beliefs.size();
  check_holdings(state.holdings, n, "security");
  check_cover(partition, n);
  const std::vector<double> ms = expectations(beliefs, options.discount);
  const double w = state.welfare(beliefs);

  Builder b;
  b.inst.provenance = 1;
  for (std::size_t i : partition.plus) {
    const double s = beliefs[i].price_now;
    b.add({Role::Buy, InstrumentClass::Security, i}, ms[i] - s, ms[i] - s, s, label("x_plus", i));
  }
  std::vector<std::size_t> sells;
  for (std::size_t i : partition.minus) {
    const double s = beliefs[i].price_now;
    sells.push_back(b.add({Role::Sell, InstrumentClass::Security, i}, s - ms[i], s - ms[i], -s, label("x_minus", i)));
  }
  for (std::size_t i : partition.minus) {
    const double s = beliefs[i].price_now;
    b.add({Role::ShortBorrow, InstrumentClass::Security, i}, s - ms[i], s - ms[i], s, label("z_minus", i));
  }
  for (std::size_t k = 0; k < partition.minus.size(); ++k) b.caps.emplace_back(sells[k], held(state.holdings, partition.minus[k]));

  for (const auto& [i, v] : state.holdings) {
    b.inst.lp.objective_offset += static_cast<double>(v) * (ms[i] - beliefs[i].price_now);
    b.welfare_const += static_cast<double>(v) * ms[i];
  }
  b.welfare_const += state.cash;
  b.leverage_const = -state.cash;

  for (std::size_t i : partition.plus)
    if (!(ms[i] > beliefs[i].price_now)) b.inst.contradictions.push_back(i);
  for (std::size_t i : partition.minus)
    if (!(ms[i] < beliefs[i].price_now)) b.inst.contradictions.push_back(i);
  std::sort(b.inst.contradictions.begin(), b.inst.contradictions.end());
  return b.finish(state.threshold, state.leverage, w);
}

ProblemInstance build_problem2(const TraderState& state, std::span<const SecurityBelief> beliefs, const Partition& partition,
                               const BuildOptions& options) {
  state.validate();
  check_holdings(state.holdings, beliefs.size(), "security");
  check_cover(partition, beliefs.size());
  check_hat(partition);
  const std::vector<double> ms = expectations(beliefs, options.discount);

  Builder b;
  b.inst.provenance = 2;
  add_securities(b, state, beliefs, partition, ms);
  b.welfare_const += state.cash;
  b.leverage_const -= state.cash;
  return b.finish(state.threshold, state.leverage, state.welfare(beliefs));
}

ProblemInstance build_problem4(const TraderState& state, std::span<const SecurityBelief> securities,
                               std::span<const FuturesSpec> futures, std::span<const OptionsSpec> options,
                               const BuildOptions& build) {
  state.validate();
  check_holdings(state.holdings, securities.size(), "security");
  const std::vector<double> ms = expectations(securities, build.discount);
  const Partition part = classify_positive(securities, state.holdings);

  Builder b;
  b.inst.provenance = 4;
  add_securities(b, state, securities, part, ms);
  double w = state.welfare(securities);

  // Futures: the sign flips the per-unit gain for contracts to supply.
  const Partition fpart = classify_positive(futures);
  for (std::size_t j = 0; j < futures.size(); ++j) {
    if (!fpart.in_hat(j)) continue;
    const auto& f = futures[j];
    const double sign = f.side == FuturesSide::Buy ? 1.0 : -1.0;
    const double msj = build.discount * expected_price(f.belief);
    b.add({Role::FuturesVolume, InstrumentClass::Futures, j}, build.discount * futures_unit_expectation(f),
          sign * (msj - f.threshold()), f.threshold(), label("v_fut", j));
  }
  for (std::size_t j = 0; j < futures.size(); ++j) {
    if (fpart.in_hat(j)) continue;
    const auto& f = futures[j];
    const double sign = f.side == FuturesSide::Buy ? 1.0 : -1.0;
    const double msj = build.discount * expected_price(f.belief);
    b.add({Role::FuturesShortBorrow, InstrumentClass::Futures, j}, sign * (f.threshold() - msj), sign * (f.threshold() - msj),
          f.threshold(), label("z_fut", j));
  }
  for (std::size_t j = 0; j < futures.size(); ++j) {
    const auto& f = futures[j];
    if (f.held_volume <= 0) continue;
    const double v = static_cast<double>(f.held_volume), s = f.belief.price_now;
    const double msj = build.discount * expected_price(f.belief);
    w += v * s;
    if (std::find(fpart.hold.begin(), fpart.hold.end(), j) != fpart.hold.end()) {
      b.inst.lp.objective_offset += v * (msj - f.threshold());
      b.welfare_const += v * msj;
    } else {
      b.welfare_const += v * s;
      b.leverage_const -= v * f.threshold();
    }
  }

  // Options: premium is the cash paid per contract; no short borrowing.
  const Partition opart = classify_positive(options);
  for (std::size_t l = 0; l < options.size(); ++l) {
    if (!opart.in_hat(l)) continue;
    const auto& o = options[l];
    const double e = build.discount * options_unit_expectation(o);
    b.add({Role::OptionsVolume, InstrumentClass::Option, l}, e, e, o.premium, label("v_opt", l));
  }
  for (std::size_t l = 0; l < options.size(); ++l) {
    const auto& o = options[l];
    if (o.held_volume <= 0) continue;
    const double v = static_cast<double>(o.held_volume);
    w += v * o.premium;
    if (std::find(opart.hold.begin(), opart.hold.end(), l) != opart.hold.end()) {
      const double e = build.discount * options_unit_expectation(o);
      b.inst.lp.objective_offset += v * e;
      b.welfare_const += v * (o.premium + e);
    } else {
      b.welfare_const += v * o.premium;
      b.leverage_const -= v * o.premium;
    }
  }

  b.welfare_const += state.cash;
  b.leverage_const -= state.cash;
  return b.finish(state.threshold, state.leverage, w);
}

std::vector<std::string> violated_rows(const ProblemInstance& inst, const std::vector<double>& x) {
  if (x.size() != inst.lp.num_cols()) throw EngineError(ErrorCode::DimensionMismatch, "strategy length differs from variable count");
  std::vector<std::string> out;
  for (const auto& r : inst.rows) {
    double lhs = r.constant;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += inst.lp.constraint_matrix(r.lp_row, j) * x[j];
    const double tol = 1e-6 * std::max(1.0, std::abs(r.bound));
    const bool bad = (r.sense == RowSense::LessEqual && lhs > r.bound + tol) || (r.sense == RowSense::GreaterEqual && lhs < r.bound - tol) ||
                     (r.sense == RowSense::Equal && std::abs(lhs - r.bound) > tol);
    if (bad) out.push_back(r.name);
  }
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < -1e-9) out.push_back(inst.lp.col_names[j] + ">=0");
  return out;
}

namespace {

[[noreturn]] void throw_infeasible(const ProblemInstance& inst) {
  std::vector<std::string> failing = violated_rows(inst, std::vector<double>(inst.lp.num_cols(), 0.0));
  if (failing.empty()) {
    const LpOutcome relax = solve_lp(inst.lp);
    if (relax.certificate)
      for (const auto& r : inst.rows)
        if (std::abs((*relax.certificate)[r.lp_row]) > 1e-9) failing.push_back(r.name);
  }
  if (failing.empty()) failing.push_back("integrality");
  std::string msg = "no strategy satisfies " + failing.front();
  if (failing.front() == "welfare_threshold") msg += " (threshold alpha too high)";
  else if (failing.front() == "leverage") msg += " (leverage too tight)";
  throw EngineError(ErrorCode::Infeasible, msg, failing.front(), failing);
}

}  // namespace

StrategyResult solve_model1(const ProblemInstance& inst, SolveMode mode) {
  MilpOutcome out;
  if (mode == SolveMode::Exact) {
    out = solve_milp(inst.lp, inst.mask);
  } else {
    try {
      out = relax_and_round(inst.lp, inst.mask, RoundingPolicy::RoundDown);
    } catch (const EngineError& e) {
      if (e.code() != ErrorCode::RepairFailure) throw;
      // A repair failure with an infeasible integer program is infeasibility.
      if (solve_milp(inst.lp, inst.mask).status == MilpStatus::Infeasible) throw_infeasible(inst);
      throw;
    }
  }
  if (out.status == MilpStatus::Infeasible) throw_infeasible(inst);
  if (out.status == MilpStatus::Unbounded) throw EngineError(ErrorCode::Unbounded, "expected welfare increment is unbounded");
  if (!out.solution) throw EngineError(ErrorCode::NumericalFailure, "node limit reached before any integer strategy was found");

  StrategyResult res;
  res.solver = mode;
  res.status = out.status;
  res.nodes_explored = out.nodes_explored;
  res.bound = out.bound;
  std::vector<double> x(out.solution->size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto v = static_cast<std::int64_t>(std::llround((*out.solution)[j]));
    x[j] = static_cast<double>(v);
    res.volumes.push_back({inst.variable_map[j], v});
  }
  res.expected_welfare_increment = inst.lp.evaluate(x);
  res.expected_welfare = inst.welfare_now + res.expected_welfare_increment;
  return res;
}

}  // namespace engine
