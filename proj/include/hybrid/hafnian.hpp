#pragma once

#include "hybrid/simd.hpp"
#include "hybrid/types.hpp"

namespace hybrid {

inline constexpr int kNaiveMaxDim = 16;
inline constexpr int kPowertraceMaxDim = 32;
inline constexpr int kDispatchNaiveMaxDim = 8;
inline constexpr long long kRepeatedMaxTerms = 1LL << 20;

struct HafnianOptions {
  int threads = 0;                               // 0: worker_count()
  const simd::ComplexKernels* kernels = nullptr;  // nullptr: simd::active_kernels()
};

/// max |X - X^T|
double symmetry_residual(const CMatrix& X);

/// Sum over perfect matchings; 2n <= 16.
cplx hafnian_naive(const CMatrix& X);

/// Inclusion-exclusion over the n row pairs (i, i + n):
/// haf X = sum_S (-1)^(n-|S|) [lambda^n] det(1 - lambda X_S P)^(-1/2),
/// with the characteristic polynomial from a Hessenberg reduction. The subset
/// loop runs in fixed chunks with compensated sums and a fixed reduction
/// tree, so the value does not depend on the thread count. 2n <= 32.
cplx hafnian_powertrace(const CMatrix& X, const HafnianOptions& options = {});

/// Naive for 2n <= 8, power-trace otherwise.
cplx hafnian(const CMatrix& X, const HafnianOptions& options = {});

/// haf of C with row/column j repeated counts[j] times and M + j repeated
/// counts[j] times (C is 2M x 2M), without building the extended matrix:
/// the inclusion-exclusion runs over 0 <= k <= counts with binomial weights,
/// in extended precision. At most kRepeatedMaxTerms lattice points. When
/// `magnitude` is given it receives the sum of absolute term values, which
/// bounds the cancellation error.
cplx hafnian_repeated(const CMatrix& C, const CountsVector& counts, double* magnitude = nullptr);

inline constexpr long long kRecursiveMaxEntries = 1LL << 22;

/// haf(C~) / prod_j counts[j]! from the recursion of the generating function
/// exp(z^T C z / 2): with a_k its Taylor coefficients scaled by sqrt(k!),
/// sqrt(k_i + 1) a_{k+e_i} = sum_j C_ij sqrt(k_j) a_{k-e_j}. Needs the whole box
/// prod (counts[j] + 1)^2, at most kRecursiveMaxEntries entries.
cplx scaled_hafnian_recursive(const CMatrix& C, const CountsVector& counts);

/// Coefficients c_0 = 1, ..., c_m of det(1 - lambda X). Exposed for tests.
CVector characteristic_coefficients(const CMatrix& X, const simd::ComplexKernels& kernels);

}  // namespace hybrid
