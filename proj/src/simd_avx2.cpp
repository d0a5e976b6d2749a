#include <immintrin.h>

#include "hybrid/simd.hpp"

namespace hybrid::simd::detail {

namespace {

// Interleaved layout: one __m256d holds two complex numbers [re0, im0, re1, im1].

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    const __m256d ys = _mm256_permute_pd(yv, 0b0101);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, ys, acc_im);
  }
  alignas(32) double re[4], im[4];
  _mm256_store_pd(re, acc_re);
  _mm256_store_pd(im, acc_im);
  double sre = (re[0] + re[1]) + (re[2] + re[3]);
  double sim = (im[0] - im[1]) + (im[2] - im[3]);
  for (; i < n; ++i) {
    sre += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    sim += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {sre, sim};
}

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_setr_pd(-a.imag(), a.imag(), -a.imag(), a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0b0101);
    __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    yv = _mm256_fmadd_pd(ar, xv, yv);
    yv = _mm256_fmadd_pd(ai, xs, yv);
    _mm256_storeu_pd(yp + 2 * i, yv);
  }
  for (; i < n; ++i) {
    y[i] = {y[i].real() + a.real() * x[i].real() - a.imag() * x[i].imag(),
            y[i].imag() + a.real() * x[i].imag() + a.imag() * x[i].real()};
  }
}

}  // namespace

const ComplexKernels* avx2_kernels() {
  static const ComplexKernels k{Isa::Avx2, &dotc, &axpy};
  return &k;
}

}  // namespace hybrid::simd::detail
