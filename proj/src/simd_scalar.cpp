#include "hybrid/simd.hpp"

namespace hybrid::simd::detail {

namespace {

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = {y[i].real() + a.real() * x[i].real() - a.imag() * x[i].imag(),
            y[i].imag() + a.real() * x[i].imag() + a.imag() * x[i].real()};
  }
}

}  // namespace

const ComplexKernels& scalar_kernels() {
  static const ComplexKernels k{Isa::Scalar, &dotc, &axpy};
  return k;
}

}  // namespace hybrid::simd::detail
