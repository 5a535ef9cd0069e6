#include "engine/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace engine::kernels {

namespace {

struct Table {
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
};

Table table_for(Isa isa) {
  switch (isa) {
#if defined(ENGINE_HAVE_AVX2)
    case Isa::Avx2: return {&avx2::axpy, &avx2::dot};
#endif
#if defined(ENGINE_HAVE_NEON)
    case Isa::Neon: return {&neon::axpy, &neon::dot};
#endif
    default: return {&scalar::axpy, &scalar::dot};
  }
}

std::atomic<int>& active_slot() {
  static std::atomic<int> slot{static_cast<int>(detect_isa())};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(ENGINE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(ENGINE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (const char* env = std::getenv("ENGINE_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && isa_supported(Isa::Avx2)) return Isa::Avx2;
    if (want == "neon" && isa_supported(Isa::Neon)) return Isa::Neon;
  }
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() { return static_cast<Isa>(active_slot().load(std::memory_order_relaxed)); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::invalid_argument("ISA not supported on this CPU");
  active_slot().store(static_cast<int>(isa), std::memory_order_relaxed);
}

void axpy(double a, const double* x, double* y, std::size_t n) { table_for(active_isa()).axpy(a, x, y, n); }

double dot(const double* x, const double* y, std::size_t n) { return table_for(active_isa()).dot(x, y, n); }

}  // namespace engine::kernels
