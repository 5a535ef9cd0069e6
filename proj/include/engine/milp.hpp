#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "engine/lp.hpp"

namespace engine {

struct IntegerMask {
  std::vector<bool> flags;

  static IntegerMask all(std::size_t n) { return {std::vector<bool>(n, true)}; }
  static IntegerMask none(std::size_t n) { return {std::vector<bool>(n, false)}; }
  std::size_t size() const { return flags.size(); }
  bool operator[](std::size_t i) const { return flags[i]; }
};

enum class MilpStatus { Optimal, Infeasible, Unbounded, GapLimit };

std::string_view to_string(MilpStatus s);

struct MilpOutcome {
  MilpStatus status = MilpStatus::Infeasible;
  std::optional<std::vector<double>> solution;
  std::optional<double> objective_value;
  // Best bound on the optimum (relaxation value for relax_and_round).
  double bound = 0.0;
  std::size_t nodes_explored = 0;
};

inline constexpr double kIntTol = 1e-6;
inline constexpr std::size_t kDefaultNodeLimit = 100000;

struct MilpOptions {
  std::size_t node_limit = kDefaultNodeLimit;
  // After the optimum is known, minimise these variables one at a time
  // (objective held at its optimum) so ties resolve to the
  // lexicographically smallest solution on them.
  std::vector<std::size_t> lexicographic;
};

MilpOutcome solve_milp(const LinearProgram& lp, const IntegerMask& mask, const MilpOptions& options = {});

enum class RoundingPolicy { RoundDown, Nearest };

MilpOutcome relax_and_round(const LinearProgram& lp, const IntegerMask& mask, RoundingPolicy policy);

}  // namespace engine
