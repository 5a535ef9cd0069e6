#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "engine/expectations.hpp"
#include "engine/lp.hpp"
#include "engine/milp.hpp"

namespace engine {

struct TraderState {
  double cash = 0.0;       // m_t
  Holdings holdings;       // security index -> v_{i,t}
  double leverage = 0.0;   // k_t
  double threshold = 1.0;  // alpha

  // W_t = m_t + sum v * s over securities.
  double welfare(std::span<const SecurityBelief> beliefs) const;
  void validate() const;
};

enum class InstrumentClass { Security, Futures, Option };
enum class Role { Buy, Sell, ShortBorrow, FuturesVolume, FuturesShortBorrow, OptionsVolume };

std::string_view to_string(Role r);
std::string_view to_string(InstrumentClass c);

struct VariableRole {
  Role role;
  InstrumentClass cls;
  std::size_t instrument;

  bool operator==(const VariableRole&) const = default;
};

// lhs = <coeffs, x> + constant, compared against bound. The LP row carries
// rhs = bound - constant.
struct NamedRow {
  std::string name;
  std::size_t lp_row;
  double constant;
  double bound;
  RowSense sense;
};

struct ProblemInstance {
  LinearProgram lp;  // objective_offset holds the constant terms
  IntegerMask mask;
  std::vector<VariableRole> variable_map;
  int provenance = 0;  // 1, 2 or 4
  double welfare_now = 0.0;
  std::vector<NamedRow> rows;
  // Problem 1: indices whose expected move contradicts the stated direction.
  std::vector<std::size_t> contradictions;

  double objective_constant() const { return lp.objective_offset; }
  const NamedRow* row(const std::string& name) const;
};

struct BuildOptions {
  // Multiplies every expected t+1 price; 1.0 means money value is constant.
  double discount = 1.0;
};

ProblemInstance build_problem1(const TraderState& state, std::span<const SecurityBelief> beliefs,
                               const Partition& partition, const BuildOptions& options = {});
ProblemInstance build_problem2(const TraderState& state, std::span<const SecurityBelief> beliefs,
                               const Partition& partition, const BuildOptions& options = {});
ProblemInstance build_problem4(const TraderState& state, std::span<const SecurityBelief> securities,
                               std::span<const FuturesSpec> futures, std::span<const OptionsSpec> options,
                               const BuildOptions& build = {});

enum class SolveMode { Exact, Rounded };

std::string_view to_string(SolveMode m);

struct RoleVolume {
  VariableRole var;
  std::int64_t volume;
};

struct StrategyResult {
  std::vector<RoleVolume> volumes;
  double expected_welfare_increment = 0.0;
  double expected_welfare = 0.0;
  SolveMode solver = SolveMode::Exact;
  double bound = 0.0;
  MilpStatus status = MilpStatus::Optimal;
  std::size_t nodes_explored = 0;
};

// Throws EngineError(Infeasible) with path = the failing row name.
StrategyResult solve_model1(const ProblemInstance& inst, SolveMode mode);

// Names of rows violated (beyond 1e-6) by the given volumes, recomputed from
// the named rows rather than taken from the solver.
std::vector<std::string> violated_rows(const ProblemInstance& inst, const std::vector<double>& x);

}  // namespace engine
