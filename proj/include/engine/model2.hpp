#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "engine/lp.hpp"
#include "engine/milp.hpp"

namespace engine {

enum class GroupKind { Plus, Minus, Zero };
enum class GameClass { Security, Futures, Option };

std::string_view to_string(GroupKind k);
std::string_view to_string(GameClass c);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct GameInstrument {
  std::string id;
  GroupKind group = GroupKind::Plus;
  double price_now = 0.0;
  double price_min = 0.0;
  double price_max = 0.0;
  double holding = 0.0;  // v_t, Situation 2
  double strike = 0.0;   // K for futures and options
  double carry = 0.0;    // c for futures, premium for options
  std::optional<Interval> y_box;  // overrides the default exchange rows
  std::optional<Interval> z_box;
};

struct ClassInputs {
  std::vector<GameInstrument> instruments;
  double p_plus = 0.5;
  double p_minus = 0.5;
};

// sum coeff * x[id] (sense) rhs; senses other than >= are negated into >= form.
struct TraderRow {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  RowSense sense = RowSense::GreaterEqual;
  double rhs = 0.0;
};

struct GameInputs {
  ClassInputs securities;
  ClassInputs futures;
  ClassInputs options;
  std::vector<TraderRow> rows;
};

// -sum price * x >= -(cash + sum borrowed units * price). Futures cost K + c
// per contract and options their premium; securities their current price.
TraderRow cash_budget_row(const GameInputs& in, double cash, const std::vector<std::pair<std::string, double>>& borrows,
                          std::string name = "cash");

struct GroupBlock {
  GameClass cls;
  GroupKind kind;
  std::size_t size;
  double p;
  std::size_t x_offset;
  std::size_t w_offset;  // y block at w_offset, z block at w_offset + size
};

struct GameSpec {
  Matrix trader_matrix;  // B_t
  std::vector<double> trader_rhs;
  std::vector<std::string> trader_row_names;
  Matrix exchange_matrix;  // A_t
  std::vector<double> exchange_rhs;
  Matrix payoff_matrix;  // D_t, n x 2n
  std::vector<double> offset_q;
  std::vector<double> cost_K;
  IntegerMask integer_mask;
  std::vector<std::string> x_names;
  std::vector<std::string> w_names;
  std::vector<GroupBlock> blocks;

  std::size_t num_x() const { return payoff_matrix.rows(); }
  std::size_t num_w() const { return payoff_matrix.cols(); }
};

// Securities only, holdings ignored (Situation 1).
GameSpec build_game(const GameInputs& in);
// Securities only, q from holdings (Situation 2).
GameSpec build_game_with_holdings(const GameInputs& in);
// All three classes with cost vector K and offset from every class's holdings.
GameSpec build_derivative_game(const GameInputs& in);

double evaluate_payoff(const GameSpec& g, const std::vector<double>& x, const std::vector<double>& w);

struct InnerSolution {
  double value;
  std::vector<double> w;
};

// min over theta of the payoff at fixed x.
InnerSolution inner_minimum(const GameSpec& g, const std::vector<double>& x);

struct MaximinResult {
  std::vector<double> x_star;
  std::vector<double> z_star;  // inner dual multipliers on the exchange rows
  std::vector<double> w_star;  // worst-case scenario at x_star
  double value = 0.0;
  double relaxation_bound = 0.0;
  double inner_value = 0.0;  // independent re-solve of the inner LP at x_star
  MilpStatus status = MilpStatus::Optimal;
  std::size_t nodes_explored = 0;
};

struct SaddlePointResult {
  std::vector<double> x_star;
  std::vector<double> w_star;
  std::vector<double> h_star;
  std::vector<double> pi_star;
  double value = 0.0;
  double dual_value = 0.0;  // <-d, pi> + <q, w> + (K terms vanish at optimum)
};

MaximinResult solve_maximin_exact(const GameSpec& g, const MilpOptions& options = {});
SaddlePointResult solve_maximin_upper_bound(const GameSpec& g);

// The LP pair: Q over (h, x) maximised, P over (pi, w) minimised.
LinearProgram upper_bound_lp(const GameSpec& g);
LinearProgram exchange_dual_lp(const GameSpec& g);

}  // namespace engine
