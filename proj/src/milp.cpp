#include "engine/milp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "engine/errors.hpp"

namespace engine {

std::string_view to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "Optimal";
    case MilpStatus::Infeasible: return "Infeasible";
    case MilpStatus::Unbounded: return "Unbounded";
    case MilpStatus::GapLimit: return "GapLimit";
  }
  return "?";
}

namespace {

void check_mask(const LinearProgram& lp, const IntegerMask& mask) {
  lp.validate();
  if (mask.size() != lp.num_cols()) throw EngineError(ErrorCode::DimensionMismatch, "integer mask length differs from variable count");
}

bool has_continuous(const IntegerMask& mask) {
  return std::any_of(mask.flags.begin(), mask.flags.end(), [](bool b) { return !b; });
}

// Re-optimises the continuous variables with every masked variable fixed at x.
std::optional<std::vector<double>> fix_and_resolve(const LinearProgram& lp, const IntegerMask& mask, const std::vector<double>& x) {
  LinearProgram sub = lp;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (mask[j]) sub.var_lower[j] = sub.var_upper[j] = x[j];
  const LpOutcome out = solve_lp(sub);
  if (out.status != LpStatus::Optimal) return std::nullopt;
  std::vector<double> full = *out.primal;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (mask[j]) full[j] = x[j];
  return full;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - kIntTol) return true;
    if (a[i] > b[i] + kIntTol) return false;
  }
  return false;
}

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> x;
  double bound;  // max-form
  std::size_t seq;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.seq > b.seq;
  }
};

MilpOutcome branch_and_bound(const LinearProgram& lp, const IntegerMask& mask, std::size_t node_limit) {
  const double s = lp.sense == Sense::Maximize ? 1.0 : -1.0;
  MilpOutcome out;
  std::size_t seq = 0;
  auto solve_node = [&](const std::vector<double>& lo, const std::vector<double>& hi) -> std::optional<Node> {
    LinearProgram sub = lp;
    sub.var_lower = lo;
    sub.var_upper = hi;
    const LpOutcome r = solve_lp(sub);
    if (r.status == LpStatus::Unbounded) throw EngineError(ErrorCode::Unbounded, "relaxation unbounded");
    if (r.status != LpStatus::Optimal) return std::nullopt;
    return Node{lo, hi, *r.primal, s * *r.objective_value, seq++};
  };

  std::optional<Node> root;
  try {
    root = solve_node(lp.var_lower, lp.var_upper);
  } catch (const EngineError& e) {
    if (e.code() != ErrorCode::Unbounded) throw;
    out.status = MilpStatus::Unbounded;
    out.bound = s * kInf;
    return out;
  }
  if (!root) {
    out.status = MilpStatus::Infeasible;
    out.bound = -s * kInf;
    return out;
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(std::move(*root));
  std::optional<std::vector<double>> best;
  double best_val = -kInf;
  const bool mixed = has_continuous(mask);

  while (!open.empty()) {
    if (out.nodes_explored >= node_limit) break;
    Node node = open.top();
    open.pop();
    const double tol = 1e-9 * std::max(1.0, std::abs(best_val));
    if (best && node.bound <= best_val + tol) continue;
    ++out.nodes_explored;

    std::size_t branch = node.x.size();
    double worst = kIntTol;
    for (std::size_t j = 0; j < node.x.size(); ++j) {
      if (!mask[j]) continue;
      const double f = node.x[j] - std::floor(node.x[j]);
      const double dist = std::min(f, 1.0 - f);
      if (dist > worst) { worst = dist; branch = j; }
    }
    if (branch == node.x.size()) {
      std::vector<double> cand = node.x;
      for (std::size_t j = 0; j < cand.size(); ++j)
        if (mask[j]) cand[j] = std::round(cand[j]);
      if (mixed) {
        auto full = fix_and_resolve(lp, mask, cand);
        if (!full) continue;
        cand = std::move(*full);
      }
      const double v = s * lp.evaluate(cand);
      const double vt = 1e-9 * std::max(1.0, std::abs(v));
      if (!best || v > best_val + vt || (v >= best_val - vt && lex_less(cand, *best))) {
        best = cand;
        best_val = std::max(v, best_val);
      }
      continue;
    }
    const double xv = node.x[branch];
    std::vector<double> hi = node.upper;
    hi[branch] = std::floor(xv);
    if (hi[branch] >= node.lower[branch])
      if (auto child = solve_node(node.lower, hi)) open.push(std::move(*child));
    std::vector<double> lo = node.lower;
    lo[branch] = std::ceil(xv);
    if (lo[branch] <= node.upper[branch])
      if (auto child = solve_node(lo, node.upper)) open.push(std::move(*child));
  }

  double open_bound = -kInf;
  if (!open.empty()) open_bound = open.top().bound;
  if (best) {
    out.solution = *best;
    out.objective_value = lp.evaluate(*best);
  }
  const bool open_better = !best || open_bound > best_val + 1e-9 * std::max(1.0, std::abs(best_val));
  if (!open.empty() && out.nodes_explored >= node_limit && open_better) {
    out.status = MilpStatus::GapLimit;
    out.bound = s * (best ? std::max(open_bound, best_val) : open_bound);
    return out;
  }
  out.status = best ? MilpStatus::Optimal : MilpStatus::Infeasible;
  out.bound = best ? *out.objective_value : -s * kInf;
  return out;
}

}  // namespace

MilpOutcome solve_milp(const LinearProgram& lp, const IntegerMask& mask, const MilpOptions& options) {
  check_mask(lp, mask);
  MilpOutcome out = branch_and_bound(lp, mask, options.node_limit);
  if (out.status != MilpStatus::Optimal || options.lexicographic.empty()) return out;

  const double value = *out.objective_value;
  const double slack = 1e-7 * std::max(1.0, std::abs(value));
  LinearProgram pinned = lp;
  pinned.add_row(lp.objective, lp.sense == Sense::Maximize ? RowSense::GreaterEqual : RowSense::LessEqual,
                 lp.sense == Sense::Maximize ? value - lp.objective_offset - slack : value - lp.objective_offset + slack,
                 pinned.row_names.empty() ? std::string{} : std::string("objective_pin"));
  std::size_t nodes = out.nodes_explored;
  for (std::size_t k : options.lexicographic) {
    if (k >= lp.num_cols()) throw EngineError(ErrorCode::DimensionMismatch, "lexicographic index out of range");
    LinearProgram probe = pinned;
    probe.sense = Sense::Minimize;
    std::fill(probe.objective.begin(), probe.objective.end(), 0.0);
    probe.objective[k] = 1.0;
    probe.objective_offset = 0.0;
    const MilpOutcome r = branch_and_bound(probe, mask, options.node_limit);
    nodes += r.nodes_explored;
    if (r.status != MilpStatus::Optimal) break;
    double v = (*r.solution)[k];
    if (mask[k]) v = std::round(v);
    pinned.var_lower[k] = pinned.var_upper[k] = v;
  }
  LinearProgram final_lp = lp;
  for (std::size_t k : options.lexicographic) {
    if (pinned.var_lower[k] == pinned.var_upper[k]) final_lp.var_lower[k] = final_lp.var_upper[k] = pinned.var_lower[k];
  }
  MilpOutcome fin = branch_and_bound(final_lp, mask, options.node_limit);
  nodes += fin.nodes_explored;
  if (fin.status == MilpStatus::Optimal && std::abs(*fin.objective_value - value) <= slack * 2.0) {
    out.solution = fin.solution;
    out.objective_value = fin.objective_value;
  }
  out.nodes_explored = nodes;
  return out;
}

namespace {

double total_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double v = 0.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const double a = lp.row_activity(i, x);
    switch (lp.constraint_senses[i]) {
      case RowSense::LessEqual: v += std::max(0.0, a - lp.rhs[i]); break;
      case RowSense::GreaterEqual: v += std::max(0.0, lp.rhs[i] - a); break;
      case RowSense::Equal: v += std::abs(a - lp.rhs[i]); break;
    }
  }
  for (std::size_t j = 0; j < lp.num_cols(); ++j) v += std::max(0.0, lp.var_lower[j] - x[j]) + std::max(0.0, x[j] - lp.var_upper[j]);
  return v;
}

}  // namespace

MilpOutcome relax_and_round(const LinearProgram& lp, const IntegerMask& mask, RoundingPolicy policy) {
  check_mask(lp, mask);
  MilpOutcome out;
  const LpOutcome relax = solve_lp(lp);
  const double s = lp.sense == Sense::Maximize ? 1.0 : -1.0;
  if (relax.status == LpStatus::Infeasible) {
    out.status = MilpStatus::Infeasible;
    out.bound = -s * kInf;
    return out;
  }
  if (relax.status == LpStatus::Unbounded) {
    out.status = MilpStatus::Unbounded;
    out.bound = s * kInf;
    return out;
  }
  out.bound = *relax.objective_value;
  out.nodes_explored = 1;
  std::vector<double> x = *relax.primal;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!mask[j]) continue;
    const double r = std::round(x[j]);
    if (std::abs(x[j] - r) <= kIntTol) x[j] = r;
    else x[j] = policy == RoundingPolicy::RoundDown ? std::floor(x[j]) : std::floor(x[j] + 0.5);
    x[j] = std::clamp(x[j], std::ceil(lp.var_lower[j] - kIntTol), std::floor(lp.var_upper[j] + kIntTol));
  }
  const bool mixed = has_continuous(mask);
  for (;;) {
    if (mixed) {
      if (auto full = fix_and_resolve(lp, mask, x)) {
        x = std::move(*full);
        break;
      }
    } else if (lp.max_violation(x) <= kFeasTol) {
      break;
    }
    // Greedy repair: decrement the masked variable whose unit decrement
    // reduces violation at the smallest objective loss (lowest index on ties).
    const double current = total_violation(lp, x);
    std::size_t pick = x.size();
    double pick_loss = kInf;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!mask[j] || x[j] - 1.0 < lp.var_lower[j] - kIntTol) continue;
      x[j] -= 1.0;
      const double after = total_violation(lp, x);
      x[j] += 1.0;
      if (after >= current - 1e-12) continue;
      const double loss = s * lp.objective[j];
      if (loss < pick_loss) { pick_loss = loss; pick = j; }
    }
    if (pick == x.size()) throw EngineError(ErrorCode::RepairFailure, "no unit decrement of a rounded variable reduces the violation");
    x[pick] -= 1.0;
  }
  out.solution = x;
  out.objective_value = lp.evaluate(x);
  const bool tight = std::abs(*out.objective_value - out.bound) <= 1e-9 * std::max(1.0, std::abs(out.bound));
  out.status = tight ? MilpStatus::Optimal : MilpStatus::GapLimit;
  return out;
}

}  // namespace engine
