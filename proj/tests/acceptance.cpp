// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "engine/ability.hpp"
#include "engine/errors.hpp"
#include "engine/expectations.hpp"
#include "engine/lp.hpp"
#include "engine/model1.hpp"
#include "engine/model2.hpp"
#include "engine/scenario.hpp"
#include "fixtures.hpp"
#include "game_oracle.hpp"
#include "model1_oracle.hpp"
#include "oracles.hpp"
#include "series_util.hpp"

using namespace engine;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) note << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

int failures = 0;

void report(const char* name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.note << "exception: " << e.what() << "; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %s (%s%.3f s)\n", o.ok ? "PASS" : "FAIL", name, o.note.str().c_str(), secs);
  std::fflush(stdout);
  failures += o.ok ? 0 : 1;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GameSpec fixture_game() { return scenario_game(scenario_from_json(fixtures::load_json("two_security.json"))); }

bool close(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i)
    if (!(std::abs(got[i] - want[i]) <= tol)) return false;
  return true;
}

void two_security_bound(Outcome& o) {
  const GameSpec g = fixture_game();
  const auto t0 = std::chrono::steady_clock::now();
  const auto ub = solve_maximin_upper_bound(g);
  const double secs = elapsed(t0);
  o.require(close(ub.x_star, {150, 0}, 1e-6), "x");
  o.require(std::abs(ub.value - 13500) <= 1e-6, "value");
  o.require(close(ub.pi_star, {0, 0, 0.9}, 1e-6), "u");
  o.require(close(ub.w_star, {100, 75, 35, 50}, 1e-6), "w");
  o.require(close(ub.h_star, {90, 0, 60, 0, 0, 0, 0, 0}, 1e-6), "h");
  o.require(secs < 1.0, "runtime");
  o.note << "value " << ub.value << ", solve " << secs << " s; ";
}

void two_security_exact(Outcome& o) {
  const GameSpec g = fixture_game();
  const auto t0 = std::chrono::steady_clock::now();
  const auto ub = solve_maximin_upper_bound(g);
  const auto ex = solve_maximin_exact(g);
  o.require(ex.x_star == ub.x_star, "exact x equals bound x");
  o.require(std::abs(ex.value - ub.value) <= 1e-6, "exact value equals bound value");

  // every integer x with 100 x1 + 50 x2 <= 15000, inner minimum over the box corners
  goracle::Exchange box;
  for (std::size_t k = 0; k < g.num_w(); ++k) {
    box.lo.push_back(g.exchange_rhs[2 * k]);
    box.hi.push_back(-g.exchange_rhs[2 * k + 1]);
  }
  o.require(g.exchange_rhs.size() == 2 * g.num_w(), "exchange side is a box");
  const auto verts = goracle::vertices(box);
  double best = -kInf;
  std::vector<double> arg;
  std::size_t points = 0;
  for (std::int64_t x1 = 0; 100 * x1 <= 15000; ++x1)
    for (std::int64_t x2 = 0; 100 * x1 + 50 * x2 <= 15000; ++x2) {
      const std::vector<double> x = {double(x1), double(x2)};
      ++points;
      if (!goracle::in_trader(g, x)) continue;
      const double v = goracle::inner_min(g, verts, x);
      if (v > best + 1e-9) best = v, arg = x;
    }
  o.require(std::abs(best - ex.value) <= 1e-6, "enumerated maximum equals exact value");
  o.require(std::abs(goracle::inner_min(g, verts, ex.x_star) - best) <= 1e-6, "exact x attains the enumerated maximum");
  o.require(arg == ex.x_star, "enumeration argmax");
  const double secs = elapsed(t0);
  o.require(secs < 60.0, "runtime");
  o.note << points << " lattice points, max " << best << "; ";
}

void expectation_examples(Outcome& o) {
  const double a = expected_price({10, Direction::Increase, 0.6, 2, 12});
  const double b = expected_price({100, Direction::Decrease, 0.6, 90, 160});
  o.require(std::abs(a - 9.80) <= 1e-12, "first example");
  o.require(std::abs(b - 103.00) <= 1e-12, "second example");
  o.note << a << ", " << b << "; ";
}

void lp_duality(Outcome& o) {
  std::mt19937_64 rng(424242);
  int solved = 0, drawn = 0;
  double worst_gap = 0.0, worst_diff = 0.0;
  while (solved < 1000) {
    ++drawn;
    const std::size_t n = 1 + rng() % 8;
    const std::size_t m = 1 + rng() % (n <= 4 ? 6 : n <= 6 ? 4 : 2);
    const LinearProgram lp = oracle::random_lp(rng, n, m);
    const auto vr = oracle::vertex_enumeration(lp);
    if (!vr.feasible) continue;
    ++solved;
    auto [p, d] = solve_dual_pair(lp);
    o.require(p.status == LpStatus::Optimal && d.status == LpStatus::Optimal, "optimal primal and dual");
    if (p.status != LpStatus::Optimal || d.status != LpStatus::Optimal) continue;
    const double gap = std::abs(*p.objective_value - *d.objective_value);
    const double diff = std::abs(*p.objective_value - vr.value);
    worst_gap = std::max(worst_gap, gap);
    worst_diff = std::max(worst_diff, diff);
    o.require(gap <= 1e-6, "duality gap");
    o.require(diff <= 1e-9, "vertex enumeration value");
  }
  o.note << solved << " LPs of " << drawn << " drawn, max gap " << worst_gap << ", max |value - oracle| " << worst_diff << "; ";
}

void maximin_ordering(Outcome& o) {
  std::mt19937_64 rng(2026);
  std::size_t samples = 0;
  for (int t = 0; t < 200; ++t) {
    const auto rg = goracle::random_game(rng, 1 + t % 3, t % 2 ? 40 : 120, true, t % 4 < 2);
    const GameSpec& g = rg.game;
    const auto ub = solve_maximin_upper_bound(g);
    const auto ex = solve_maximin_exact(g);
    o.require(ex.value <= ub.value + 1e-6, "exact <= bound");
    const double tol = 1e-6 * std::max(1.0, std::abs(ub.value));
    for (int s = 0; s < 100; ++s) {
      const auto w = goracle::sample_w(rng, rg);
      const auto x = goracle::sample_x(rng, rg);
      o.require(goracle::payoff(g, ub.x_star, w) >= ub.value - tol, "F(x*, w) >= value");
      o.require(goracle::payoff(g, x, ub.w_star) <= ub.value + tol, "F(x, w*) <= value");
      ++samples;
    }
  }
  o.note << "200 games, " << samples << " sampled pairs; ";
}

void model1_oracle(Outcome& o) {
  std::mt19937_64 rng(777);
  int feasible = 0, rounded_checked = 0;
  for (int t = 0; t < 100; ++t) {
    const auto c = m1oracle::random_case(rng, 1 + t % 2);
    const auto extents = m1oracle::extents(c.inst);
    o.require(extents.size() <= 3, "at most 3 integer variables");
    for (auto e : extents) o.require(e <= 25, "lattice extent <= 25");
    const auto b = m1oracle::brute(c);
    if (!b.feasible) {
      bool threw = false;
      try {
        solve_model1(c.inst, SolveMode::Exact);
      } catch (const EngineError&) {
        threw = true;
      }
      o.require(threw, "infeasible instance reported");
      continue;
    }
    ++feasible;
    const auto exact = solve_model1(c.inst, SolveMode::Exact);
    o.require(std::abs(exact.expected_welfare_increment - b.value) <= 1e-6, "exact equals lattice search");
    try {
      const auto rounded = solve_model1(c.inst, SolveMode::Rounded);
      o.require(rounded.expected_welfare_increment <= exact.expected_welfare_increment + 1e-9, "rounded <= exact");
      ++rounded_checked;
    } catch (const EngineError& e) {
      o.require(e.code() == ErrorCode::RepairFailure, "rounding fails only with RepairFailure");
    }
  }
  o.note << feasible << " feasible of 100, " << rounded_checked << " rounded; ";
}

void derivative_coefficients(Outcome& o) {
  TraderState st;
  st.cash = 10000;
  st.leverage = 0.5;
  FuturesSpec f;
  f.strike_basis = 98;
  f.carry_cost = 2;
  f.belief = {100, Direction::Increase, 0.6, 80, 120};
  OptionsSpec call;
  call.strike = 95;
  call.premium = 5;
  call.belief = {100, Direction::Increase, 0.6, 60, 120};
  OptionsSpec put;
  put.strike = 45;
  put.premium = 5;
  put.kind = OptionKind::Put;
  put.belief = {50, Direction::Decrease, 0.7, 40, 70};
  const std::vector<FuturesSpec> fut = {f};
  const std::vector<OptionsSpec> opt = {call, put};
  const auto inst = build_problem4(st, {}, fut, opt);

  // hand expansion around the break-even price h: the believed move has
  // weight p, the other two (1-p)/2; moves land on the midpoint of their side
  const double hf = 98 + 2;
  const double fut_hand = 0.6 * ((hf + 120) / 2 - hf) + 0.2 * ((80 + hf) / 2 - hf) + 0.2 * 0.0;
  const double hc = 95 + 5;
  const double call_hand = 0.6 * std::max((hc + 120) / 2 - hc, -5.0) + 0.2 * std::max((60 + hc) / 2 - hc, -5.0) +
                           0.2 * std::max(0.0, -5.0);
  const double hp = 45 + 5;
  const double put_hand = 0.7 * std::max(hp - (40 + hp) / 2, -5.0) + 0.15 * std::max(hp - (hp + 70) / 2, -5.0) +
                          0.15 * std::max(0.0, -5.0);
  o.require(inst.lp.num_cols() == 3, "three derivative columns");
  if (inst.lp.num_cols() != 3) return;
  o.require(std::abs(fut_hand - 4.0) <= 1e-12 && std::abs(inst.lp.objective[0] - fut_hand) <= 1e-12, "futures 4");
  o.require(std::abs(call_hand - 5.0) <= 1e-12 && std::abs(inst.lp.objective[1] - call_hand) <= 1e-12, "call 5");
  o.require(std::abs(put_hand - 2.75) <= 1e-12 && std::abs(inst.lp.objective[2] - put_hand) <= 1e-12, "put 2.75");
  o.note << "coefficients " << inst.lp.objective[0] << ", " << inst.lp.objective[1] << ", " << inst.lp.objective[2] << "; ";
}

void ability(Outcome& o) {
  const TimeSeries s = seriesutil::random_walk(99, 20000);
  const auto offsets = sample_segments(s, 30, 10000, 7);
  const auto recs = run_trials(s, offsets, 30, make_oracle_predictor(s, 0.7, 7));
  const auto est = estimate_ability(recs);
  o.require(recs.size() == 10000, "10000 trials");
  o.require(std::abs(est.p_hat - 0.7) <= 0.02, "p_hat within 0.02 of 0.7");

  const TimeSeries walk = seriesutil::random_walk(8, 1000);
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    sum += simulate_trading(walk, make_oracle_predictor(walk, 0.55, seed), [](std::size_t) { return std::int64_t{1}; }).total;
  o.require(sum / 200 > 0.0, "mean P&L > 0");
  o.note << "p_hat " << est.p_hat << ", mean P&L " << sum / 200 << "; ";
}

}  // namespace

int main() {
  report("two-security bound: x=(150,0), value 13500, u, w, h within 1e-6, under 1 s", two_security_bound);
  report("two-security exact equals bound, confirmed by lattice enumeration, under 60 s", two_security_exact);
  report("expected price examples 9.80 and 103.00 to 1e-12", expectation_examples);
  report("LP duality: 1000 random LPs, gap <= 1e-6, vertex enumeration within 1e-9", lp_duality);
  report("maximin ordering and saddle inequalities on 200 random games", maximin_ordering);
  report("Model 1 exact equals lattice search on 100 instances, rounded <= exact", model1_oracle);
  report("problem 4 derivative coefficients 4, 5, 2.75 to 1e-12", derivative_coefficients);
  report("ability: p_hat 0.7 +/- 0.02 over 10000 trials, p=0.55 mean P&L > 0 over 200 seeds", ability);
  return failures;
}
