#include <random>

#include "doctest.h"
#include "engine/errors.hpp"
#include "engine/kernels.hpp"
#include "engine/lp.hpp"
#include "oracles.hpp"
#include "worked_example.hpp"

using namespace engine;


TEST_CASE("single-variable bound") {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.add_row({1.0}, RowSense::LessEqual, 5.0);
  auto out = solve_lp(lp);
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK((*out.primal)[0] == doctest::Approx(5.0));
  CHECK(*out.objective_value == doctest::Approx(5.0));
  CHECK((*out.dual)[0] == doctest::Approx(1.0));
}

TEST_CASE("two-security exchange LP reaches 13500 with u3 = 0.9") {
  auto out = solve_lp(worked::exchange_lp());
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(*out.objective_value == doctest::Approx(13500).epsilon(1e-12));
  CHECK((*out.primal)[2] == doctest::Approx(0.9));
  CHECK((*out.primal)[3] == doctest::Approx(100));
  CHECK((*out.primal)[4] == doctest::Approx(75));
}

TEST_CASE("two-security bound LP and its mechanical dual") {
  const LinearProgram q_lp = worked::bound_lp();
  auto [primal, dual] = solve_dual_pair(q_lp);
  REQUIRE(primal.status == LpStatus::Optimal);
  REQUIRE(dual.status == LpStatus::Optimal);
  CHECK(std::abs(*primal.objective_value - 13500) < 1e-6);
  CHECK(std::abs(*dual.objective_value - 13500) < 1e-6);
  const auto& x = *primal.primal;
  const double expect[10] = {90, 0, 60, 0, 0, 0, 0, 0, 150, 0};
  for (int k = 0; k < 10; ++k) CHECK(std::abs(x[k] - expect[k]) < 1e-6);
  CHECK(std::abs((*primal.dual)[2] - 0.9) < 1e-6);
  CHECK(check_duality_certificate(q_lp, *primal.primal, *primal.dual));
}

TEST_CASE("duality certificate") {
  const LinearProgram q_lp = worked::bound_lp();
  const std::vector<double> primal = {90, 0, 60, 0, 0, 0, 0, 0, 150, 0};
  const std::vector<double> dual = {0, 0, 0.9, 100, 75, 35, 50};
  CHECK(check_duality_certificate(q_lp, primal, dual));

  SUBCASE("zero vectors are not optimal") {
    LinearProgram lp;
    lp.add_variable(1.0);
    lp.add_row({1.0}, RowSense::LessEqual, 5.0);
    CHECK_FALSE(check_duality_certificate(lp, {0.0}, {0.0}));
  }
  SUBCASE("perturbed primal value") {
    auto shifted = primal;
    shifted[0] -= 1e-3 / 100.0;  // objective drops by 1e-3
    CHECK_FALSE(check_duality_certificate(q_lp, shifted, dual));
  }
  SUBCASE("dual sign violation") {
    auto bad = dual;
    bad[0] = -1.0;
    CHECK_FALSE(check_duality_certificate(q_lp, primal, bad));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(check_duality_certificate(q_lp, {1.0}, dual), EngineError);
  }
}

TEST_CASE("infeasible primal pairs with infeasible or unbounded dual") {
  LinearProgram lp;
  lp.add_variable(1.0, -kInf, kInf);
  lp.add_row({1.0}, RowSense::GreaterEqual, 1.0);
  lp.add_row({1.0}, RowSense::LessEqual, 0.0);
  auto [p, d] = solve_dual_pair(lp);
  CHECK(p.status == LpStatus::Infeasible);
  CHECK(d.status != LpStatus::Optimal);
  REQUIRE(p.certificate);
  // Farkas: the multipliers combine x >= 1 and x <= 0 into 0 >= 1.
  const auto& y = *p.certificate;
  CHECK(y[0] > 0);
  CHECK(y[1] > 0);
  CHECK(std::abs(y[0] - y[1]) < 1e-9);
}

TEST_CASE("unbounded LP reports an improving ray") {
  LinearProgram lp;
  lp.add_variable(1.0);
  lp.add_variable(0.0);
  lp.add_row({1.0, -1.0}, RowSense::LessEqual, 1.0);
  auto out = solve_lp(lp);
  REQUIRE(out.status == LpStatus::Unbounded);
  REQUIRE(out.certificate);
  const auto& d = *out.certificate;
  CHECK(d[0] > 0);
  CHECK(d[0] - d[1] <= 1e-12);
}

TEST_CASE("equality rows, free and negative-bounded variables") {
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.add_variable(1.0, -kInf, kInf);
  lp.add_variable(2.0, -3.0, 4.0);
  lp.add_variable(-1.0, -kInf, 2.0);
  lp.add_row({1, 1, 1}, RowSense::Equal, 1.0);
  lp.add_row({1, -1, 0}, RowSense::GreaterEqual, -2.0);
  auto vr = oracle::vertex_enumeration(lp);
  auto out = solve_lp(lp);
  REQUIRE(vr.feasible);
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(std::abs(*out.objective_value - vr.value) < 1e-9);
  CHECK(check_duality_certificate(lp, *out.primal, *out.dual));
  auto [p, d] = solve_dual_pair(lp);
  CHECK(std::abs(*p.objective_value - *d.objective_value) < 1e-6);
}

TEST_CASE("dimension checks") {
  LinearProgram lp;
  lp.objective = {1.0, 2.0};
  lp.var_lower = {0.0};
  lp.var_upper = {kInf, kInf};
  CHECK_THROWS_AS(solve_lp(lp), EngineError);
  lp.var_lower = {0.0, 3.0};
  lp.var_upper = {1.0, 2.0};
  try {
    solve_lp(lp);
    FAIL("expected DimensionMismatch");
  } catch (const EngineError& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("random LPs agree with vertex enumeration and certify") {
  std::mt19937_64 rng(20261015);
  int optimal = 0, infeasible = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 6;
    const std::size_t m = 1 + rng() % 6;
    const LinearProgram lp = oracle::random_lp(rng, n, m);
    const auto vr = oracle::vertex_enumeration(lp);
    const auto out = solve_lp(lp);
    if (!vr.feasible) {
      CHECK(out.status == LpStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(out.status == LpStatus::Optimal);
    ++optimal;
    CHECK(std::abs(*out.objective_value - vr.value) <= 1e-9 * std::max(1.0, std::abs(vr.value)));
    CHECK(lp.max_violation(*out.primal) <= 1e-6);
    CHECK(check_duality_certificate(lp, *out.primal, *out.dual));
    auto [p, d] = solve_dual_pair(lp);
    REQUIRE(d.status == LpStatus::Optimal);
    CHECK(std::abs(*p.objective_value - *d.objective_value) <= 1e-6);
  }
  CHECK(optimal > 150);
  MESSAGE("optimal=" << optimal << " infeasible=" << infeasible);
}

TEST_CASE("weak duality on sampled feasible pairs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    // max c.x, Ax <= b, x >= 0 with b >= 0 so both sides are feasible and bounded.
    const std::size_t n = 2 + rng() % 4, m = 2 + rng() % 4;
    LinearProgram lp;
    for (std::size_t j = 0; j < n; ++j) lp.add_variable(std::round(u(rng) * 10 - 2));
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> a(n);
      for (double& v : a) v = std::round(u(rng) * 6 + 0.5);
      lp.add_row(a, RowSense::LessEqual, std::round(u(rng) * 20 + 1));
    }
    const LinearProgram dual = build_dual(lp);
    for (int s = 0; s < 5; ++s) {
      LinearProgram pp = lp, dd = dual;
      for (double& c : pp.objective) c = u(rng) * 2 - 1;
      for (double& c : dd.objective) c = u(rng) * 3;
      auto xp = solve_lp(pp);
      auto yd = solve_lp(dd);
      REQUIRE(xp.status == LpStatus::Optimal);
      REQUIRE(yd.status == LpStatus::Optimal);
      const double primal_value = lp.evaluate(*xp.primal);
      const double dual_value = dual.evaluate(*yd.primal);
      CHECK(primal_value <= dual_value + 1e-9);
    }
  }
}

TEST_CASE("determinism and ISA independence") {
  std::mt19937_64 rng(99);
  const auto saved = kernels::active_isa();
  for (int t = 0; t < 40; ++t) {
    const LinearProgram lp = oracle::random_lp(rng, 6, 6);
    const auto a = solve_lp(lp);
    const auto b = solve_lp(lp);
    CHECK(a == b);
    kernels::set_active_isa(kernels::Isa::Scalar);
    const auto c = solve_lp(lp);
    kernels::set_active_isa(saved);
    CHECK(a.status == c.status);
    CHECK(a.primal == c.primal);
    CHECK(a.dual == c.dual);
    CHECK(a.iterations == c.iterations);
  }
}

TEST_CASE("MPS emission") {
  const std::string text = to_mps(worked::exchange_lp(), "EXCHANGE");
  CHECK(text.find("NAME EXCHANGE") == 0);
  CHECK(text.find(" L  R0") != std::string::npos);
  CHECK(text.find("    u3  OBJ  15000") != std::string::npos);
  CHECK(text.find(" LO BND  y1  100") != std::string::npos);
  CHECK(text.find(" UP BND  z2  65") != std::string::npos);
  CHECK(text.find("ENDATA") != std::string::npos);
  CHECK(to_mps(worked::bound_lp()).find("OBJSENSE") != std::string::npos);
}
