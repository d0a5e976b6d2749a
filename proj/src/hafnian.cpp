#include "hybrid/hafnian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "hybrid/parallel.hpp"

namespace hybrid {

namespace {

constexpr std::size_t kChunk = 256;

template <class T>
using Complex = std::complex<T>;

// Reduces the column-major m x m matrix `a` to upper Hessenberg form in place
// by Householder similarity transforms.
void hessenberg(cplx* a, int m, const simd::ComplexKernels& k, std::vector<cplx>& v, std::vector<cplx>& w) {
  v.resize(static_cast<std::size_t>(m));
  w.resize(static_cast<std::size_t>(m));
  for (int col = 0; col + 2 < m; ++col) {
    const int len = m - col - 1;
    cplx* x = a + static_cast<std::ptrdiff_t>(col) * m + col + 1;
    double tail = 0.0;
    for (int i = 1; i < len; ++i) tail += std::norm(x[i]);
    if (tail == 0.0) continue;
    const double norm = std::sqrt(tail + std::norm(x[0]));
    const cplx alpha = x[0] == cplx{} ? cplx(-norm) : -norm * (x[0] / std::abs(x[0]));
    for (int i = 0; i < len; ++i) v[static_cast<std::size_t>(i)] = x[i];
    v[0] -= alpha;
    const double vv = k.dotc(static_cast<std::size_t>(len), v.data(), v.data()).real();
    const double scale = 2.0 / vv;

    for (int j = col; j < m; ++j) {
      cplx* target = a + static_cast<std::ptrdiff_t>(j) * m + col + 1;
      const cplx s = k.dotc(static_cast<std::size_t>(len), v.data(), target);
      k.axpy(static_cast<std::size_t>(len), -scale * s, v.data(), target);
    }
    std::fill(w.begin(), w.end(), cplx{});
    for (int l = 0; l < len; ++l) {
      k.axpy(static_cast<std::size_t>(m), v[static_cast<std::size_t>(l)],
             a + static_cast<std::ptrdiff_t>(col + 1 + l) * m, w.data());
    }
    for (int l = 0; l < len; ++l) {
      k.axpy(static_cast<std::size_t>(m), -scale * std::conj(v[static_cast<std::size_t>(l)]), w.data(),
             a + static_cast<std::ptrdiff_t>(col + 1 + l) * m);
    }
    x[0] = alpha;
    for (int i = 1; i < len; ++i) x[i] = cplx{};
  }
}

// Same reduction with plain loops, any precision.
template <class T>
void hessenberg_generic(std::vector<Complex<T>>& a, int m) {
  std::vector<Complex<T>> v(static_cast<std::size_t>(m)), w(static_cast<std::size_t>(m));
  auto at = [&](int r, int c) -> Complex<T>& { return a[static_cast<std::size_t>(c) * m + r]; };
  for (int col = 0; col + 2 < m; ++col) {
    const int len = m - col - 1;
    T tail = 0;
    for (int i = 1; i < len; ++i) tail += std::norm(at(col + 1 + i, col));
    if (tail == T(0)) continue;
    const Complex<T> x0 = at(col + 1, col);
    const T norm = std::sqrt(tail + std::norm(x0));
    const Complex<T> alpha = x0 == Complex<T>{} ? Complex<T>(-norm) : -norm * (x0 / std::abs(x0));
    T vv = 0;
    for (int i = 0; i < len; ++i) {
      v[static_cast<std::size_t>(i)] = at(col + 1 + i, col);
      if (i == 0) v[0] -= alpha;
      vv += std::norm(v[static_cast<std::size_t>(i)]);
    }
    const T scale = T(2) / vv;
    for (int j = col; j < m; ++j) {
      Complex<T> s{};
      for (int i = 0; i < len; ++i) s += std::conj(v[static_cast<std::size_t>(i)]) * at(col + 1 + i, j);
      s *= scale;
      for (int i = 0; i < len; ++i) at(col + 1 + i, j) -= s * v[static_cast<std::size_t>(i)];
    }
    for (int r = 0; r < m; ++r) {
      Complex<T> s{};
      for (int l = 0; l < len; ++l) s += at(r, col + 1 + l) * v[static_cast<std::size_t>(l)];
      s *= scale;
      for (int l = 0; l < len; ++l) at(r, col + 1 + l) -= s * std::conj(v[static_cast<std::size_t>(l)]);
    }
    at(col + 1, col) = alpha;
    for (int i = 1; i < len; ++i) at(col + 1 + i, col) = Complex<T>{};
  }
}

// Characteristic coefficients of an upper Hessenberg matrix (La Budde):
// det(1 - lambda H) = sum_j c_j lambda^j. `table` is scratch.
template <class T>
void la_budde(const Complex<T>* h, int m, std::vector<Complex<T>>& table, Complex<T>* out) {
  auto H = [&](int r, int c) { return h[static_cast<std::size_t>(c) * m + r]; };  // 0-based
  const std::size_t stride = static_cast<std::size_t>(m) + 1;
  table.assign(stride * stride, Complex<T>{});
  auto c = [&](int i, int j) -> Complex<T>& { return table[static_cast<std::size_t>(i) * stride + j]; };
  c(0, 0) = 1;
  for (int i = 1; i <= m; ++i) {
    c(i, 0) = 1;
    for (int j = 1; j <= i; ++j) {
      Complex<T> value = (j <= i - 1 ? c(i - 1, j) : Complex<T>{}) - H(i - 1, i - 1) * c(i - 1, j - 1);
      Complex<T> beta_product = 1;
      for (int mm = 1; mm <= j - 1; ++mm) {
        beta_product *= H(i - mm, i - mm - 1);
        value -= H(i - mm - 1, i - 1) * beta_product * c(i - mm - 1, j - mm - 1);
      }
      c(i, j) = value;
    }
  }
  for (int j = 0; j <= m; ++j) out[j] = c(m, j);
}

// [lambda^n] of p(lambda)^(-1/2) for p = sum_{i <= deg} c_i lambda^i, c_0 = 1.
template <class T>
Complex<T> inverse_sqrt_coefficient(const Complex<T>* c, int deg, int n, std::vector<Complex<T>>& g) {
  g.assign(static_cast<std::size_t>(n) + 1, Complex<T>{});
  g[0] = 1;
  for (int j = 1; j <= n; ++j) {
    Complex<T> s{};
    for (int i = 1; i <= std::min(j, deg); ++i) {
      s += c[i] * (T(j) - T(i) / T(2)) * g[static_cast<std::size_t>(j - i)];
    }
    g[static_cast<std::size_t>(j)] = -s / T(j);
  }
  return g[static_cast<std::size_t>(n)];
}

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

  static void add(double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  void add(cplx z) {
    add(re, cre, z.real());
    add(im, cim, z.imag());
  }
  cplx value() const { return {re + cre, im + cim}; }
};

void check_square_even(const CMatrix& X, int limit, const char* method) {
  if (X.rows() != X.cols()) throw DimensionError("hafnian needs a square matrix");
  if (X.rows() % 2 != 0) throw DimensionError("hafnian needs an even dimension");
  if (X.rows() > limit) {
    throw SizeError(std::string(method) + " hafnian supports dimension <= " + std::to_string(limit) + ", got " +
                    std::to_string(X.rows()));
  }
  const double scale = std::max(1.0, max_abs(X));
  if (symmetry_residual(X) > 1e-8 * scale) throw AsymmetryError("hafnian needs a symmetric matrix");
}

cplx naive_recursive(const CMatrix& X, std::vector<int>& remaining) {
  if (remaining.empty()) return 1.0;
  const int first = remaining.back();
  remaining.pop_back();
  cplx total = 0.0;
  for (std::size_t k = 0; k < remaining.size(); ++k) {
    const int partner = remaining[k];
    const cplx weight = X(first, partner);
    if (weight == cplx{}) continue;
    const int moved = remaining.back();
    remaining[k] = moved;
    remaining.pop_back();
    total += weight * naive_recursive(X, remaining);
    remaining.push_back(moved);
    remaining[k] = partner;
  }
  remaining.push_back(first);
  return total;
}

}  // namespace

double symmetry_residual(const CMatrix& X) { return max_abs(X - X.transpose()); }

cplx hafnian_naive(const CMatrix& X) {
  check_square_even(X, kNaiveMaxDim, "naive");
  std::vector<int> remaining;
  for (int i = static_cast<int>(X.rows()) - 1; i >= 0; --i) remaining.push_back(i);
  return naive_recursive(X, remaining);
}

CVector characteristic_coefficients(const CMatrix& X, const simd::ComplexKernels& kernels) {
  const int m = static_cast<int>(X.rows());
  CMatrix h = X;
  std::vector<cplx> v, w, table;
  hessenberg(h.data(), m, kernels, v, w);
  CVector out(m + 1);
  la_budde<double>(h.data(), m, table, out.data());
  return out;
}

cplx hafnian_powertrace(const CMatrix& X, const HafnianOptions& options) {
  check_square_even(X, kPowertraceMaxDim, "power-trace");
  const int n = static_cast<int>(X.rows()) / 2;
  if (n == 0) return 1.0;
  const simd::ComplexKernels& kernels = options.kernels ? *options.kernels : simd::active_kernels();

  const std::size_t subsets = std::size_t{1} << n;
  const std::size_t chunks = (subsets + kChunk - 1) / kChunk;
  std::vector<cplx> partial(chunks);

  parallel_for(chunks, worker_count(options.threads), [&](std::size_t chunk) {
    thread_local std::vector<cplx> B, v, w, table, coeffs, g;
    thread_local std::vector<int> sel;
    CompensatedSum sum;
    const std::size_t end = std::min(subsets, (chunk + 1) * kChunk);
    for (std::size_t mask = chunk * kChunk; mask < end; ++mask) {
      const int k = std::popcount(mask);
      if (k == 0) continue;
      sel.clear();
      for (int i = 0; i < n; ++i) {
        if (mask >> i & 1U) sel.push_back(i);
      }
      for (int i = 0; i < k; ++i) sel.push_back(sel[static_cast<std::size_t>(i)] + n);
      const int m = 2 * k;
      B.resize(static_cast<std::size_t>(m) * m);
      for (int b = 0; b < m; ++b) {
        const int source = sel[static_cast<std::size_t>(b < k ? b + k : b - k)];
        for (int a = 0; a < m; ++a) {
          B[static_cast<std::size_t>(b) * m + a] = X(sel[static_cast<std::size_t>(a)], source);
        }
      }
      hessenberg(B.data(), m, kernels, v, w);
      coeffs.resize(static_cast<std::size_t>(m) + 1);
      la_budde<double>(B.data(), m, table, coeffs.data());
      const cplx term = inverse_sqrt_coefficient<double>(coeffs.data(), m, n, g);
      sum.add((n - k) % 2 == 0 ? term : -term);
    }
    partial[chunk] = sum.value();
  });
  return pairwise_sum(std::move(partial));
}

cplx hafnian(const CMatrix& X, const HafnianOptions& options) {
  if (X.rows() <= kDispatchNaiveMaxDim) return hafnian_naive(X);
  return hafnian_powertrace(X, options);
}

cplx hafnian_repeated(const CMatrix& C, const CountsVector& counts, double* magnitude) {
  using T = long double;
  const int M = static_cast<int>(C.rows()) / 2;
  if (C.rows() != C.cols() || C.rows() % 2 != 0) throw DimensionError("base matrix must be 2M x 2M");
  if (static_cast<int>(counts.size()) != M) throw DimensionError("counts vector does not match the base matrix");

  std::vector<int> modes, reps;
  int n = 0;
  long long terms = 1;
  for (int j = 0; j < M; ++j) {
    if (counts[static_cast<std::size_t>(j)] < 0) throw DimensionError("counts must be nonnegative");
    if (counts[static_cast<std::size_t>(j)] == 0) continue;
    modes.push_back(j);
    reps.push_back(counts[static_cast<std::size_t>(j)]);
    n += reps.back();
    terms *= reps.back() + 1;
    if (terms > kRepeatedMaxTerms) {
      throw SizeError("outcome needs more than " + std::to_string(kRepeatedMaxTerms) +
                      " inclusion-exclusion terms; lower the counts");
    }
  }
  if (magnitude) *magnitude = 1.0;
  if (n == 0) return 1.0;
  const int r = static_cast<int>(modes.size());

  // binom[j][k] = C(reps[j], k)
  std::vector<std::vector<T>> binom(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) {
    auto& row = binom[static_cast<std::size_t>(j)];
    row.assign(static_cast<std::size_t>(reps[static_cast<std::size_t>(j)]) + 1, 1);
    for (int k = 1; k <= reps[static_cast<std::size_t>(j)]; ++k) {
      row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k - 1)] *
                                         T(reps[static_cast<std::size_t>(j)] - k + 1) / T(k);
    }
  }

  std::vector<int> k(static_cast<std::size_t>(r), 0), active, rows;
  std::vector<Complex<T>> B, table, coeffs, g;
  Complex<T> total{}, compensation{};
  T absolute = 0;
  for (long long step = 0; step < terms; ++step) {
    if (step > 0) {
      for (int j = r - 1; j >= 0; --j) {
        if (++k[static_cast<std::size_t>(j)] <= reps[static_cast<std::size_t>(j)]) break;
        k[static_cast<std::size_t>(j)] = 0;
      }
    }
    active.clear();
    int size = 0;
    T weight = 1;
    for (int j = 0; j < r; ++j) {
      if (k[static_cast<std::size_t>(j)] == 0) continue;
      active.push_back(j);
      size += k[static_cast<std::size_t>(j)];
      weight *= binom[static_cast<std::size_t>(j)][static_cast<std::size_t>(k[static_cast<std::size_t>(j)])];
    }
    if (active.empty()) continue;
    const int a = static_cast<int>(active.size());
    const int m = 2 * a;
    rows.clear();
    for (int j : active) rows.push_back(modes[static_cast<std::size_t>(j)]);
    for (int j : active) rows.push_back(M + modes[static_cast<std::size_t>(j)]);
    B.resize(static_cast<std::size_t>(m) * m);
    for (int y = 0; y < m; ++y) {
      const int swapped = y < a ? y + a : y - a;
      const T mult = T(k[static_cast<std::size_t>(active[static_cast<std::size_t>(y % a)])]);
      for (int x = 0; x < m; ++x) {
        const cplx entry = C(rows[static_cast<std::size_t>(x)], rows[static_cast<std::size_t>(swapped)]);
        B[static_cast<std::size_t>(y) * m + x] = Complex<T>(entry.real(), entry.imag()) * mult;
      }
    }
    hessenberg_generic<T>(B, m);
    coeffs.resize(static_cast<std::size_t>(m) + 1);
    la_budde<T>(B.data(), m, table, coeffs.data());
    Complex<T> term = inverse_sqrt_coefficient<T>(coeffs.data(), m, n, g) * weight;
    if ((n - size) % 2 != 0) term = -term;
    absolute += std::abs(term);
    // Kahan summation in extended precision.
    const Complex<T> y = term - compensation;
    const Complex<T> t = total + y;
    compensation = (t - total) - y;
    total = t;
  }
  if (magnitude) *magnitude = static_cast<double>(absolute);
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

cplx scaled_hafnian_recursive(const CMatrix& C, const CountsVector& counts) {
  const int M = static_cast<int>(C.rows()) / 2;
  if (C.rows() != C.cols() || C.rows() % 2 != 0) throw DimensionError("base matrix must be 2M x 2M");
  if (static_cast<int>(counts.size()) != M) throw DimensionError("counts vector does not match the base matrix");

  // Active indices: j and M + j for every mode with a nonzero count.
  std::vector<int> rows, limit;
  for (int j = 0; j < M; ++j) {
    if (counts[static_cast<std::size_t>(j)] < 0) throw DimensionError("counts must be nonnegative");
    if (counts[static_cast<std::size_t>(j)] > 0) rows.push_back(j);
  }
  if (rows.empty()) return 1.0;
  const int a = static_cast<int>(rows.size());
  for (int i = 0; i < a; ++i) rows.push_back(M + rows[static_cast<std::size_t>(i)]);
  const int d = 2 * a;
  for (int i = 0; i < d; ++i) limit.push_back(counts[static_cast<std::size_t>(rows[static_cast<std::size_t>(i % a)])]);

  // Mixed-radix strides, last index fastest.
  std::vector<long long> stride(static_cast<std::size_t>(d));
  long long entries = 1;
  for (int i = d - 1; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] = entries;
    entries *= limit[static_cast<std::size_t>(i)] + 1;
    if (entries > kRecursiveMaxEntries) {
      throw SizeError("recursive evaluation needs more than " + std::to_string(kRecursiveMaxEntries) + " entries");
    }
  }
  std::vector<double> root(static_cast<std::size_t>(*std::max_element(limit.begin(), limit.end())) + 2);
  for (std::size_t k = 0; k < root.size(); ++k) root[k] = std::sqrt(static_cast<double>(k));

  std::vector<cplx> amp(static_cast<std::size_t>(entries));
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  amp[0] = 1.0;
  for (long long index = 1; index < entries; ++index) {
    for (int i = d - 1; i >= 0; --i) {
      if (++k[static_cast<std::size_t>(i)] <= limit[static_cast<std::size_t>(i)]) break;
      k[static_cast<std::size_t>(i)] = 0;
    }
    int i = 0;
    while (k[static_cast<std::size_t>(i)] == 0) ++i;
    // Step down along i, then apply the recursion from k - e_i.
    const long long base = index - stride[static_cast<std::size_t>(i)];
    cplx sum{};
    for (int j = 0; j < d; ++j) {
      const int kj = k[static_cast<std::size_t>(j)] - (j == i ? 1 : 0);
      if (kj == 0) continue;
      sum += C(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]) * root[static_cast<std::size_t>(kj)] *
             amp[static_cast<std::size_t>(base - stride[static_cast<std::size_t>(j)])];
    }
    amp[static_cast<std::size_t>(index)] = sum / root[static_cast<std::size_t>(k[static_cast<std::size_t>(i)])];
  }
  // a_(m,m) = haf / sqrt(prod m! prod m!) = haf / prod m!.
  return amp.back();
}

}  // namespace hybrid
