#pragma once

// Independent game oracle: the exchange polyhedron is a box, optionally cut
// by one coupling row a.w >= r. Its vertices are listed explicitly (box
// corners plus the row's crossings of box edges), so the inner minimum is a
// minimum over a finite list and needs no LP.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "engine/model2.hpp"
#include "oracles.hpp"

namespace goracle {

using engine::GameSpec;

struct Exchange {
  std::vector<double> lo, hi;
  std::vector<double> a;  // empty when there is no coupling row
  double r = 0.0;
};

inline std::vector<std::vector<double>> vertices(const Exchange& ex) {
  const std::size_t n = ex.lo.size();
  std::vector<std::vector<double>> out;
  auto ok = [&](const std::vector<double>& w) {
    if (ex.a.empty()) return true;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += ex.a[k] * w[k];
    return s >= ex.r - 1e-9 * std::max(1.0, std::abs(ex.r));
  };
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = (mask >> k) & 1 ? ex.hi[k] : ex.lo[k];
    if (ok(w)) out.push_back(w);
  }
  if (ex.a.empty()) return out;
  for (std::size_t free = 0; free < n; ++free) {
    if (ex.a[free] == 0.0) continue;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      if ((mask >> free) & 1) continue;
      std::vector<double> w(n);
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == free) continue;
        w[k] = (mask >> k) & 1 ? ex.hi[k] : ex.lo[k];
        s += ex.a[k] * w[k];
      }
      w[free] = (ex.r - s) / ex.a[free];
      if (w[free] >= ex.lo[free] - 1e-12 && w[free] <= ex.hi[free] + 1e-12) out.push_back(w);
    }
  }
  return out;
}

// Naive double loop over D, then K and q.
inline double payoff(const GameSpec& g, const std::vector<double>& x, const std::vector<double>& w) {
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = 0; k < w.size(); ++k) v += x[j] * g.payoff_matrix(j, k) * w[k];
  for (std::size_t j = 0; j < x.size(); ++j) v -= g.cost_K[j] * x[j];
  for (std::size_t k = 0; k < w.size(); ++k) v += g.offset_q[k] * w[k];
  return v;
}

inline double inner_min(const GameSpec& g, const std::vector<std::vector<double>>& verts, const std::vector<double>& x) {
  double best = engine::kInf;
  for (const auto& w : verts) best = std::min(best, payoff(g, x, w));
  return best;
}

inline bool in_trader(const GameSpec& g, const std::vector<double>& x, double tol = 1e-9) {
  for (std::size_t i = 0; i < g.trader_matrix.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += g.trader_matrix(i, j) * x[j];
    if (s < g.trader_rhs[i] - tol * std::max(1.0, std::abs(g.trader_rhs[i]))) return false;
  }
  for (double v : x)
    if (v < 0) return false;
  return true;
}

struct Brute {
  bool feasible = false;
  double value = 0.0;
  std::vector<std::int64_t> x;
};

// max over integer x in [0, hi] within the trader polyhedron of the inner minimum.
inline Brute brute_maximin(const GameSpec& g, const std::vector<std::vector<double>>& verts, const std::vector<std::int64_t>& hi) {
  Brute best;
  std::vector<double> xd(hi.size());
  oracle::for_each_lattice_point(std::vector<std::int64_t>(hi.size(), 0), hi, [&](const std::vector<std::int64_t>& x) {
    for (std::size_t j = 0; j < x.size(); ++j) xd[j] = static_cast<double>(x[j]);
    if (!in_trader(g, xd)) return;
    const double v = inner_min(g, verts, xd);
    if (!best.feasible || v > best.value + 1e-9) best = {true, v, x};
  });
  return best;
}

struct RandomGame {
  engine::GameInputs inputs;
  GameSpec game;
  Exchange exchange;
  std::vector<std::int64_t> extent;  // per x, implied by the cash row
};

// Random securities game: 1-3 instruments spread over the groups, a cash row
// keeping every extent within max_extent, optional holdings and an optional
// coupling row on the exchange side that keeps the upper corner feasible.
inline RandomGame random_game(std::mt19937_64& rng, std::size_t max_instruments, std::int64_t max_extent, bool coupling,
                              bool holdings) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  {
    RandomGame rg;
    auto& sec = rg.inputs.securities;
    sec.p_plus = std::round(20 * (0.5 + 0.5 * u(rng))) / 20;
    sec.p_minus = std::round(20 * (0.5 + 0.5 * u(rng))) / 20;
    const std::size_t n = 1 + rng() % max_instruments;
    double min_price = engine::kInf;
    for (std::size_t i = 0; i < n; ++i) {
      engine::GameInstrument g;
      g.id = "s" + std::to_string(i + 1);
      g.group = static_cast<engine::GroupKind>(rng() % 3);
      g.price_now = std::round(10 + 90 * u(rng));
      g.price_min = g.price_now - std::round(g.price_now * 0.5 * u(rng));
      g.price_max = g.price_now + std::round(g.price_now * 0.5 * u(rng));
      if (holdings && rng() % 2) g.holding = static_cast<double>(rng() % 10);
      min_price = std::min(min_price, g.price_now);
      sec.instruments.push_back(g);
    }
    const double cash = std::round(min_price * static_cast<double>(max_extent) * u(rng));
    rg.inputs.rows.push_back(engine::cash_budget_row(rg.inputs, cash, {}));
    if (rng() % 3 == 0) {
      // a second, binding row over the first two instruments
      engine::TraderRow cap;
      cap.name = "cap";
      cap.terms = {{"s1", 1.0}};
      if (n > 1) cap.terms.emplace_back("s2", 2.0);
      cap.sense = engine::RowSense::LessEqual;
      cap.rhs = std::round(static_cast<double>(max_extent) * u(rng));
      rg.inputs.rows.push_back(cap);
    }
    rg.game = engine::build_game_with_holdings(rg.inputs);
    const std::size_t nw = rg.game.num_w();
    for (std::size_t k = 0; k < nw; ++k) {
      rg.exchange.lo.push_back(rg.game.exchange_rhs[2 * k]);
      rg.exchange.hi.push_back(-rg.game.exchange_rhs[2 * k + 1]);
    }
    if (coupling && rng() % 2) {
      rg.exchange.a.resize(nw);
      double top = 0.0, bottom = 0.0;
      for (std::size_t k = 0; k < nw; ++k) {
        rg.exchange.a[k] = std::round(4 * u(rng) - 1);
        top += rg.exchange.a[k] * (rg.exchange.a[k] > 0 ? rg.exchange.hi[k] : rg.exchange.lo[k]);
        bottom += rg.exchange.a[k] * (rg.exchange.a[k] > 0 ? rg.exchange.lo[k] : rg.exchange.hi[k]);
      }
      rg.exchange.r = std::round(bottom + (top - bottom) * u(rng));
      rg.game.exchange_matrix.append_row(rg.exchange.a);
      rg.game.exchange_rhs.push_back(rg.exchange.r);
    }
    rg.extent.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      // the cash row has -price in this column, and x >= 0 elsewhere
      const double price = -rg.game.trader_matrix(n, j);
      rg.extent[j] = static_cast<std::int64_t>(std::floor(cash / price + 1e-9));
    }
    return rg;
  }
}

// Rejection sample from the trader polyhedron within the extents.
inline std::vector<double> sample_x(std::mt19937_64& rng, const RandomGame& rg) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    std::vector<double> x(rg.extent.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = u(rng) * static_cast<double>(rg.extent[j]);
    if (in_trader(rg.game, x)) return x;
    if (u(rng) < 0.01) return std::vector<double>(x.size(), 0.0);
  }
}

// A point of the exchange polyhedron: pull a random box point towards the
// upper-corner side until the coupling row holds.
inline std::vector<double> sample_w(std::mt19937_64& rng, const RandomGame& rg) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& ex = rg.exchange;
  std::vector<double> w(ex.lo.size()), top(ex.lo.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = ex.lo[k] + (ex.hi[k] - ex.lo[k]) * u(rng);
    top[k] = ex.a.empty() || ex.a[k] > 0 ? ex.hi[k] : ex.lo[k];
  }
  if (ex.a.empty()) return w;
  for (int it = 0; it < 60; ++it) {
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += ex.a[k] * w[k];
    if (s >= ex.r) return w;
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = 0.5 * (w[k] + top[k]);
  }
  return top;
}

}  // namespace goracle
