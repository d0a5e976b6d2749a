#include <cstdlib>
#include <string>

#include "hybrid/simd.hpp"

namespace hybrid::simd {

#ifndef HYBRID_HAVE_AVX2
namespace detail {
const ComplexKernels* avx2_kernels() { return nullptr; }
}  // namespace detail
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(HYBRID_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return detail::avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const ComplexKernels& kernels_for(Isa isa) {
  if (!isa_supported(isa)) throw Error("SIMD variant " + std::string(to_string(isa)) + " is not available");
  if (isa == Isa::Avx2) return *detail::avx2_kernels();
  return detail::scalar_kernels();
}

const ComplexKernels& active_kernels() {
  static const ComplexKernels& chosen = [] () -> const ComplexKernels& {
    const char* forced = std::getenv("HYBRID_SAMPLER_SIMD");
    if (forced != nullptr && std::string(forced) == "scalar") return detail::scalar_kernels();
    if (isa_supported(Isa::Avx2)) return *detail::avx2_kernels();
    return detail::scalar_kernels();
  }();
  return chosen;
}

}  // namespace hybrid::simd
