#include <doctest.h>

#include "hybrid/hafnian.hpp"
#include "hybrid/simd.hpp"
#include "support.hpp"

using namespace hybrid;

TEST_CASE("simd: scalar reference is always available") {
  CHECK(simd::isa_supported(simd::Isa::Scalar));
  CHECK(simd::kernels_for(simd::Isa::Scalar).isa == simd::Isa::Scalar);
  CHECK(simd::to_string(simd::Isa::Avx2) == "avx2");
  if (!simd::isa_supported(simd::Isa::Avx2)) CHECK_THROWS_AS(simd::kernels_for(simd::Isa::Avx2), Error);
}

TEST_CASE("simd: avx2 kernels match the scalar reference") {
  if (!simd::isa_supported(simd::Isa::Avx2)) {
    MESSAGE("avx2 unavailable, skipped");
    return;
  }
  const auto& s = simd::kernels_for(simd::Isa::Scalar);
  const auto& v = simd::kernels_for(simd::Isa::Avx2);
  std::mt19937_64 rng(67);
  for (std::size_t n = 0; n <= 37; ++n) {
    const CMatrix x = testing::random_matrix(rng, static_cast<int>(n), 1);
    const CMatrix y = testing::random_matrix(rng, static_cast<int>(n), 1);
    CAPTURE(n);
    const cplx ds = s.dotc(n, x.data(), y.data());
    const cplx dv = v.dotc(n, x.data(), y.data());
    CHECK(std::abs(ds - dv) <= 1e-13 * std::max(1.0, static_cast<double>(n)));

    const cplx a(0.3, -1.1);
    CMatrix ys = y, yv = y;
    s.axpy(n, a, x.data(), ys.data());
    v.axpy(n, a, x.data(), yv.data());
    CHECK(max_abs(ys - yv) <= 1e-14);
  }
}

TEST_CASE("simd: power-trace agrees across kernels") {
  std::mt19937_64 rng(71);
  for (simd::Isa isa : {simd::Isa::Scalar, simd::Isa::Avx2}) {
    if (!simd::isa_supported(isa)) continue;
    const auto& k = simd::kernels_for(isa);
    for (int n : {3, 6, 10}) {
      const CMatrix X = testing::random_symmetric(rng, 2 * n);
      const cplx ref = hafnian_powertrace(X, {.threads = 1, .kernels = &simd::kernels_for(simd::Isa::Scalar)});
      const cplx got = hafnian_powertrace(X, {.threads = 2, .kernels = &k});
      CHECK(std::abs(ref - got) < 1e-10 * std::max(1.0, std::abs(ref)));
    }
  }
}
