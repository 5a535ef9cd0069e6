#pragma once

#include <cstddef>
#include <string_view>

// Dense vector kernels used by the simplex row update and payoff evaluation.
// Each kernel has a scalar reference; SIMD variants are picked at runtime.
namespace engine::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

// Best ISA this CPU supports, honouring ENGINE_SIMD=scalar|avx2|neon.
Isa detect_isa();
Isa active_isa();
bool isa_supported(Isa isa);
// Forces a variant (tests). Throws std::invalid_argument if unsupported.
void set_active_isa(Isa isa);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace scalar

#if defined(ENGINE_HAVE_AVX2)
namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace avx2
#endif

#if defined(ENGINE_HAVE_NEON)
namespace neon {
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace neon
#endif

}  // namespace engine::kernels
