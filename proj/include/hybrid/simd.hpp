#pragma once

#include <cstddef>
#include <string_view>

#include "hybrid/types.hpp"

namespace hybrid::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Complex double kernels over contiguous arrays.
struct ComplexKernels {
  Isa isa;
  /// sum_i conj(x_i) y_i
  cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);
  /// y_i += a x_i
  void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
};

/// True when the variant is compiled in and the CPU runs it.
bool isa_supported(Isa isa);

/// Throws Error when the variant is unavailable.
const ComplexKernels& kernels_for(Isa isa);

/// Best supported variant; HYBRID_SAMPLER_SIMD=scalar forces the reference.
const ComplexKernels& active_kernels();

namespace detail {
const ComplexKernels& scalar_kernels();
const ComplexKernels* avx2_kernels();  // nullptr when not compiled in
}  // namespace detail

}  // namespace hybrid::simd
