#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "engine/kernels.hpp"
#include "engine/lp.hpp"

using namespace engine;
namespace k = engine::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

struct IsaGuard {
  k::Isa saved = k::active_isa();
  ~IsaGuard() { k::set_active_isa(saved); }
};

}  // namespace

TEST_CASE("scalar reference") {
  std::vector<double> x{1, 2, 3}, y{10, 20, 30};
  k::scalar::axpy(2.0, x.data(), y.data(), 3);
  CHECK(y == std::vector<double>{12, 24, 36});
  CHECK(k::scalar::dot(x.data(), y.data(), 3) == 12 + 48 + 108);
  CHECK(k::scalar::dot(x.data(), y.data(), 0) == 0.0);
}

#if defined(ENGINE_HAVE_AVX2)
TEST_CASE("avx2 matches scalar") {
  if (!k::isa_supported(k::Isa::Avx2)) return;
  std::mt19937_64 rng(17);
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto x = random_vec(rng, n);
    const auto y0 = random_vec(rng, n);
    const double a = std::uniform_real_distribution<double>(-5, 5)(rng);
    auto ys = y0, yv = y0;
    k::scalar::axpy(a, x.data(), ys.data(), n);
    k::avx2::axpy(a, x.data(), yv.data(), n);
    CHECK(bitwise_equal(ys, yv));
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y0[i]);
    const double ds = k::scalar::dot(x.data(), y0.data(), n);
    const double dv = k::avx2::dot(x.data(), y0.data(), n);
    CHECK(std::abs(ds - dv) <= 1e-13 * std::max(1.0, mag));
  }
}
#endif

#if defined(ENGINE_HAVE_NEON)
TEST_CASE("neon matches scalar") {
  std::mt19937_64 rng(19);
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto x = random_vec(rng, n);
    const auto y0 = random_vec(rng, n);
    auto ys = y0, yv = y0;
    k::scalar::axpy(1.5, x.data(), ys.data(), n);
    k::neon::axpy(1.5, x.data(), yv.data(), n);
    CHECK(bitwise_equal(ys, yv));
  }
}
#endif

TEST_CASE("dispatch") {
  IsaGuard guard;
  CHECK(k::isa_supported(k::Isa::Scalar));
  CHECK(k::isa_name(k::Isa::Avx2) == "avx2");
  k::set_active_isa(k::Isa::Scalar);
  CHECK(k::active_isa() == k::Isa::Scalar);
  std::vector<double> x{1, 2}, y{3, 4};
  k::axpy(-1.0, x.data(), y.data(), 2);
  CHECK(y == std::vector<double>{2, 2});
  CHECK(k::dot(x.data(), y.data(), 2) == 6.0);
  for (k::Isa isa : {k::Isa::Avx2, k::Isa::Neon})
    if (!k::isa_supported(isa)) CHECK_THROWS_AS(k::set_active_isa(isa), std::invalid_argument);
}

TEST_CASE("simplex result does not depend on the kernel") {
  IsaGuard guard;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-4, 9);
  for (int t = 0; t < 40; ++t) {
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    for (int j = 0; j < 6; ++j) lp.add_variable(coef(rng), 0.0, 50.0);
    for (int i = 0; i < 5; ++i) {
      std::vector<double> r(6);
      for (auto& v : r) v = coef(rng);
      lp.add_row(r, RowSense::LessEqual, 20 + coef(rng));
    }
    k::set_active_isa(k::Isa::Scalar);
    const auto a = solve_lp(lp);
    for (k::Isa isa : {k::Isa::Avx2, k::Isa::Neon}) {
      if (!k::isa_supported(isa)) continue;
      k::set_active_isa(isa);
      const auto b = solve_lp(lp);
      CHECK(a.status == b.status);
      CHECK(a.iterations == b.iterations);
      if (a.primal && b.primal) CHECK(bitwise_equal(*a.primal, *b.primal));
    }
  }
}
