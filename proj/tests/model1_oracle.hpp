#pragma once

// Direct evaluation of the Model 1 objective and constraints from trader
// state and beliefs, written term by term without the instance builders.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "engine/expectations.hpp"
#include "engine/model1.hpp"
#include "oracles.hpp"

namespace m1oracle {

using engine::Direction;
using engine::Partition;
using engine::SecurityBelief;
using engine::TraderState;

struct Eval {
  double objective;
  bool feasible;
};

inline double held(const TraderState& st, std::size_t i) {
  auto it = st.holdings.find(i);
  return it == st.holdings.end() ? 0.0 : static_cast<double>(it->second);
}

inline double welfare_now(const TraderState& st, const std::vector<SecurityBelief>& b) {
  double w = st.cash;
  for (std::size_t i = 0; i < b.size(); ++i) w += held(st, i) * b[i].price_now;
  return w;
}

// Problem 1: x_plus indexed like part.plus, x_minus and z like part.minus.
inline Eval problem1(const TraderState& st, const std::vector<SecurityBelief>& b, const Partition& part,
                     const std::vector<double>& xp, const std::vector<double>& xm, const std::vector<double>& z) {
  std::vector<double> ms(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) ms[i] = engine::expected_price(b[i]);
  double obj = 0.0, future = 0.0, cash = st.cash, spend = 0.0;
  for (std::size_t i : part.zero) {
    obj += held(st, i) * (ms[i] - b[i].price_now);
    future += held(st, i) * ms[i];
  }
  for (std::size_t k = 0; k < part.plus.size(); ++k) {
    const std::size_t i = part.plus[k];
    const double s = b[i].price_now;
    obj += (held(st, i) + xp[k]) * (ms[i] - s);
    future += (held(st, i) + xp[k]) * ms[i];
    cash -= xp[k] * s;
    spend += xp[k] * s;
  }
  bool caps = true;
  double proceeds = 0.0;
  for (std::size_t k = 0; k < part.minus.size(); ++k) {
    const std::size_t i = part.minus[k];
    const double s = b[i].price_now;
    obj += (held(st, i) - xm[k]) * (ms[i] - s) + z[k] * (s - ms[i]);
    future += (held(st, i) - xm[k]) * ms[i];
    cash += xm[k] * s + z[k] * (s - ms[i]);
    spend += z[k] * s;
    proceeds += xm[k] * s;
    if (xm[k] > held(st, i) + 1e-9) caps = false;
  }
  const double w = welfare_now(st, b);
  const double tol = 1e-7 * std::max(1.0, w);
  const bool welfare_ok = future + cash >= st.threshold * w - tol;
  const bool leverage_ok = spend - (st.cash + proceeds) <= st.leverage * w + tol;
  return {obj, caps && welfare_ok && leverage_ok};
}

// Problem 2: buys over hat securities, borrows over the rest, listing order.
inline Eval problem2(const TraderState& st, const std::vector<SecurityBelief>& b, const Partition& part,
                     const std::vector<double>& x, const std::vector<double>& z) {
  std::vector<double> ms(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) ms[i] = engine::expected_price(b[i]);
  double obj = 0.0, lhs = st.cash, spend = 0.0, sold = 0.0;
  std::size_t kx = 0, kz = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double s = b[i].price_now, v = held(st, i);
    if (part.in_hat(i)) {
      obj += x[kx] * (ms[i] - s);
      lhs += x[kx] * ms[i] - x[kx] * s;
      spend += x[kx] * s;
      ++kx;
    } else {
      obj += z[kz] * (s - ms[i]);
      lhs += z[kz] * (s - ms[i]);
      spend += z[kz] * s;
      ++kz;
    }
    if (v > 0) {
      if (ms[i] - s > engine::kPositiveTol) {
        obj += v * (ms[i] - s);
        lhs += v * ms[i];
      } else {
        lhs += v * s;
        sold += v * s;
      }
    }
  }
  const double w = welfare_now(st, b);
  const double tol = 1e-7 * std::max(1.0, w);
  return {obj, lhs >= st.threshold * w - tol && spend - (st.cash + sold) <= st.leverage * w + tol};
}

struct Brute {
  bool feasible = false;
  double value = 0.0;
};

// Enumerates every volume in [0, hi] per variable of the given problem.
inline Brute brute_problem1(const TraderState& st, const std::vector<SecurityBelief>& b, const Partition& part,
                            const std::vector<std::int64_t>& hi) {
  const std::size_t np = part.plus.size(), nm = part.minus.size();
  Brute best;
  oracle::for_each_lattice_point(std::vector<std::int64_t>(hi.size(), 0), hi, [&](const std::vector<std::int64_t>& p) {
    std::vector<double> xp(np), xm(nm), z(nm);
    for (std::size_t k = 0; k < np; ++k) xp[k] = static_cast<double>(p[k]);
    for (std::size_t k = 0; k < nm; ++k) {
      xm[k] = static_cast<double>(p[np + k]);
      z[k] = static_cast<double>(p[np + nm + k]);
    }
    const Eval e = problem1(st, b, part, xp, xm, z);
    if (e.feasible && (!best.feasible || e.objective > best.value)) best = {true, e.objective};
  });
  return best;
}

inline Brute brute_problem2(const TraderState& st, const std::vector<SecurityBelief>& b, const Partition& part,
                            const std::vector<std::int64_t>& hi) {
  std::size_t nx = 0;
  for (std::size_t i = 0; i < b.size(); ++i) nx += part.in_hat(i) ? 1 : 0;
  Brute best;
  oracle::for_each_lattice_point(std::vector<std::int64_t>(hi.size(), 0), hi, [&](const std::vector<std::int64_t>& p) {
    std::vector<double> x(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(nx));
    std::vector<double> z(p.begin() + static_cast<std::ptrdiff_t>(nx), p.end());
    const Eval e = problem2(st, b, part, x, z);
    if (e.feasible && (!best.feasible || e.objective > best.value)) best = {true, e.objective};
  });
  return best;
}

// Per-variable extent implied by the leverage row: every buy or borrow costs
// s per unit and at most cash + k W + all possible sale proceeds is available.
inline std::vector<std::int64_t> extents(const engine::ProblemInstance& inst) {
  const auto* lev = inst.row("leverage");
  double budget = lev->bound - lev->constant;
  const std::size_t n = inst.lp.num_cols();
  std::vector<double> cap(n, engine::kInf);
  for (const auto& r : inst.rows) {
    if (r.name.rfind("short_cap", 0) != 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (inst.lp.constraint_matrix(r.lp_row, j) != 0.0) cap[j] = r.bound;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double a = inst.lp.constraint_matrix(lev->lp_row, j);
    if (a < 0) budget += -a * cap[j];
  }
  std::vector<std::int64_t> hi(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = inst.lp.constraint_matrix(lev->lp_row, j);
    const double h = a > 0 ? std::floor(budget / a + 1e-9) : cap[j];
    hi[j] = static_cast<std::int64_t>(std::max(0.0, std::min(h, cap[j])));
  }
  return hi;
}

struct Case {
  TraderState state;
  std::vector<SecurityBelief> beliefs;
  Partition partition;
  int problem;
  engine::ProblemInstance inst;
  std::vector<std::int64_t> hi;
};

// Random problem 1 or problem 2 case with at most three variables and
// every leverage-implied extent at most 25.
inline Case random_case(std::mt19937_64& rng, int problem) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    Case c;
    c.problem = problem;
    const std::size_t n = 1 + rng() % (problem == 1 ? 2 : 3);
    for (std::size_t i = 0; i < n; ++i) {
      SecurityBelief b;
      b.price_now = std::round(20 + 80 * u(rng));
      b.price_min = b.price_now - std::round(1 + 15 * u(rng));
      b.price_max = b.price_now + std::round(1 + 15 * u(rng));
      b.direction = static_cast<Direction>(rng() % 3);
      b.p = std::round(20 * (0.3 + 0.7 * u(rng))) / 20;
      c.beliefs.push_back(b);
      if (rng() % 2) c.state.holdings[i] = static_cast<std::int64_t>(rng() % 8);
    }
    c.state.cash = std::round(400 * u(rng));
    c.state.leverage = std::round(10 * u(rng)) / 20;
    c.state.threshold = 0.9 + 0.2 * u(rng);
    if (problem == 1) {
      for (std::size_t i = 0; i < n; ++i) {
        switch (c.beliefs[i].direction) {
          case Direction::Increase: c.partition.plus.push_back(i); break;
          case Direction::Decrease: c.partition.minus.push_back(i); break;
          case Direction::NoChange: c.partition.zero.push_back(i); break;
        }
      }
      if (c.partition.plus.size() + 2 * c.partition.minus.size() > 3) continue;
      c.inst = engine::build_problem1(c.state, c.beliefs, c.partition);
    } else {
      c.partition = engine::classify_positive(std::span<const SecurityBelief>(c.beliefs), c.state.holdings);
      c.inst = engine::build_problem2(c.state, c.beliefs, c.partition);
    }
    if (c.inst.lp.num_cols() == 0 || c.inst.lp.num_cols() > 3) continue;
    c.hi = extents(c.inst);
    bool small = true;
    for (auto h : c.hi) small = small && h <= 25;
    if (!small) continue;
    return c;
  }
}

inline Brute brute(const Case& c) {
  return c.problem == 1 ? brute_problem1(c.state, c.beliefs, c.partition, c.hi) : brute_problem2(c.state, c.beliefs, c.partition, c.hi);
}

}  // namespace m1oracle
