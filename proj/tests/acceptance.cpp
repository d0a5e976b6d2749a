#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>

#include "hybrid/blochmessiah.hpp"
#include "hybrid/gaussian.hpp"
#include "hybrid/hafnian.hpp"
#include "hybrid/parallel.hpp"
#include "hybrid/pipeline.hpp"
#include "hybrid/sampling.hpp"
#include "support.hpp"

using namespace hybrid;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.ok) ++failures;
  std::printf("%s [%d] %s: %s (%.2f s)\n", o.ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

GaussianState state_of(const std::string& config) {
  return *run_pipeline(load_config_file(testing::config_path(config)), Stage::State).state;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

Outcome bose_einstein() {
  const auto t0 = Clock::now();
  const OutcomeDistribution d = enumerate_distribution(state_of("thermal1.json"), 10);
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (int N = 0; N <= 10; ++N) worst = std::max(worst, std::abs(d.probabilities[static_cast<std::size_t>(N)] - std::pow(0.5, N + 1)));
  return {worst < 1e-10 && elapsed < 1.0, fmt("max |rho(N) - 2^-(N+1)| = %.3g over N <= 10, %.3f s", worst, elapsed)};
}

Outcome squeezed_vacuum() {
  const Pipeline p = run_pipeline(load_config_file(testing::config_path("squeezed.json")), Stage::State);
  const double r = 0.25 * std::log(4.0);
  const double r_err = std::abs(p.factors->r(0) - r);
  const OutcomeDistribution d = enumerate_distribution(*p.state, 11);
  double even = 0.0, odd = 0.0;
  for (int k = 0; k <= 5; ++k) {
    const double t = std::tanh(r);
    const double closed = factorial(2 * k) * std::pow(t, 2 * k) / (std::pow(4.0, k) * factorial(k) * factorial(k) * std::cosh(r));
    even = std::max(even, std::abs(d.probabilities[static_cast<std::size_t>(2 * k)] - closed));
    odd = std::max(odd, std::abs(d.probabilities[static_cast<std::size_t>(2 * k + 1)]));
  }
  return {r_err < 1e-10 && even < 1e-9 && odd < 1e-12,
          fmt("|r - ln4/4| = %.3g, max even error %.3g, max odd probability %.3g", r_err, even, odd)};
}

Outcome two_mode_squeezed() {
  const GaussianState g = state_of("two_mode_squeezed.json");
  const OutcomeDistribution d = enumerate_distribution(g, 8);
  double off = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const CountsVector c = d.counts_at(i);
    if (c[0] != c[1]) off += d.probabilities[i];
  }
  const OutcomeDistribution q = marginalize(d, photon_positions(d, {1, 1}));
  const double r = 0.5 * std::atanh(0.6);
  const double n = std::sinh(r) * std::sinh(r);
  double worst = 0.0;
  for (int k = 0; k <= 8; ++k) worst = std::max(worst, std::abs(q.probabilities[static_cast<std::size_t>(k)] - std::pow(n, k) / std::pow(1 + n, k + 1)));
  return {off < 1e-10 && worst < 1e-9, fmt("Pr[N != q] = %.3g, photon marginal max error %.3g", off, worst)};
}

Outcome hafnian_equivalence() {
  std::mt19937_64 rng(2024);
  double agree = 0.0, perm = 0.0, scale = 0.0, sum = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const CMatrix X = testing::random_symmetric(rng, 2 * n);
    const cplx naive = hafnian_naive(X);
    const cplx pt = hafnian_powertrace(X);
    const double mag = std::max(std::abs(naive), std::abs(pt));
    agree = std::max(agree, std::abs(naive - pt) / mag);

    std::vector<int> p(static_cast<std::size_t>(2 * n));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    CMatrix Y(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i) {
      for (int j = 0; j < 2 * n; ++j) Y(i, j) = X(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    perm = std::max(perm, std::abs(hafnian(Y) - naive) / mag);

    const cplx c = testing::random_complex(rng);
    const cplx scaled = hafnian(c * X);
    const cplx expected = std::pow(c, n) * naive;
    scale = std::max(scale, std::abs(scaled - expected) / std::max(std::abs(scaled), std::abs(expected)));

    const int m = 1 + trial % 2;
    const CMatrix Z = testing::random_symmetric(rng, 2 * m);
    CMatrix D = CMatrix::Zero(2 * (n + m), 2 * (n + m));
    D.topLeftCorner(2 * n, 2 * n) = X;
    D.bottomRightCorner(2 * m, 2 * m) = Z;
    const cplx direct = hafnian(D);
    const cplx product = naive * hafnian_naive(Z);
    sum = std::max(sum, std::abs(direct - product) / std::max(std::abs(direct), std::abs(product)));
  }
  const CMatrix big = testing::random_symmetric(rng, 20);
  const auto t0 = Clock::now();
  const cplx h20 = hafnian_powertrace(big, {.threads = 1});
  const double elapsed = seconds_since(t0);
  const bool ok = agree < 1e-9 && perm < 1e-9 && scale < 1e-9 && sum < 1e-9 && elapsed <= 60.0 && std::isfinite(h20.real());
  return {ok, fmt("naive vs power-trace %.3g, identities max %.3g, 20x20 single-threaded %.3f s", agree,
                  std::max({perm, scale, sum}), elapsed)};
}

struct Instance {
  BogoliubovDecomposition dec;
  double temperature;
};

std::vector<Instance> random_suite() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> temp(0.0, 0.6);
  std::vector<Instance> suite;
  for (int trial = 0; trial < 100; ++trial) {
    const int M = 1 + trial % 4;
    const int Ma = (trial / 4) % (M + 1);
    const CouplingBlocks b = testing::random_stable_blocks(rng, Ma, M - Ma, 0.5);
    suite.push_back({bogoliubov_diagonalize(assemble_hamiltonian(b)), trial % 5 == 0 ? 0.0 : temp(rng)});
  }
  return suite;
}

Outcome decomposition_suite(const std::vector<Instance>& suite) {
  double symp = 0.0, recon = 0.0, corr = 0.0;
  for (const Instance& in : suite) {
    symp = std::max(symp, symplectic_residual(in.dec));
    recon = std::max(recon, bloch_messiah(in.dec).reconstruction_residual);
    const GaussianState g = covariance(in.dec, in.temperature);
    corr = std::max(corr, max_abs(g.G - testing::correlator_oracle(in.dec, in.temperature)));
  }
  return {symp < 1e-10 && recon < 1e-9 && corr < 1e-10,
          fmt("symplectic %.3g, reconstruction %.3g, covariance vs correlators %.3g", symp, recon, corr)};
}

Outcome normalization(const std::vector<Instance>& suite) {
  std::vector<GaussianState> states;
  for (const char* c : {"vacuum.json", "thermal1.json", "squeezed.json", "two_mode_squeezed.json", "geometry_hybrid.json"}) {
    states.push_back(state_of(c));
  }
  for (const Instance& in : suite) {
    if (in.dec.modes() <= 2) states.push_back(covariance(in.dec, in.temperature));
  }
  int checked = 0;
  bool monotone = true;
  double worst = 0.0;
  for (const GaussianState& g : states) {
    const int M = g.modes();
    // Largest cutoff whose recursion boxes stay small.
    auto work = [M](int K) {
      double box = 0.0;
      for (int m = 0; m <= K; ++m) box += (m + 1.0) * (m + 1.0);
      return std::pow(box, M);
    };
    int K_max = 1;
    while (K_max < 60 && work(K_max + 1) <= 2e6) ++K_max;
    double previous = 0.0;
    OutcomeDistribution d;
    for (int K = 1; K <= K_max; K += (K < 8 ? 1 : 4)) {
      d = enumerate_distribution(g, K);
      if (d.captured_mass < previous - 1e-15) monotone = false;
      previous = d.captured_mass;
    }
    if (d.cutoff != K_max) d = enumerate_distribution(g, K_max);
    if (d.captured_mass < previous - 1e-15) monotone = false;
    if (d.captured_mass > 1 - 1e-8) {
      ++checked;
      worst = std::max(worst, (distribution_means(d) - mean_occupations(g)).cwiseAbs().maxCoeff());
    }
  }
  return {monotone && worst < 1e-6 && checked >= 10,
          fmt("%.0f of %.0f instances qualify, max moment error %.3g", checked, static_cast<double>(states.size()), worst) +
              (monotone ? ", captured mass monotone in K" : ", captured mass NOT monotone")};
}

Outcome sampler_statistics() {
  const OutcomeDistribution d = enumerate_distribution(state_of("thermal1.json"), 40);
  const auto s1 = sample(d, 100000, 20240601, 1);
  const ChiSquareResult chi = chi_square(d, s1);
  const bool same = sample(d, 100000, 20240601, 2) == s1 && sample(d, 100000, 20240601, 8) == s1;
  return {chi.passed && same, fmt("chi-square %.2f on %.0f dof, p = %.3g", chi.statistic, chi.dof, chi.p_value) +
                                  (same ? ", identical at 1/2/8 workers" : ", samples differ across workers")};
}

Outcome scattering_time() {
  SystemConfig base = load_config_file(testing::config_path("geometry_hybrid.json"));
  const double t0 = estimate_scattering_time(base);
  double worst = 0.0;
  auto sweep = [&](const std::function<void(SystemConfig&, double)>& set, double exponent) {
    for (double s : {0.5, 2.0, 3.0, 10.0}) {
      SystemConfig c = base;
      set(c, s);
      worst = std::max(worst, std::abs(estimate_scattering_time(c) / t0 / std::pow(s, exponent) - 1.0));
    }
  };
  sweep([](SystemConfig& c, double s) { *c.N_atoms *= s; }, 1);
  sweep([](SystemConfig& c, double s) { c.kappa_nu[0] *= s; }, 3);
  sweep([](SystemConfig& c, double s) { *c.delta_a *= s; }, 2);
  sweep([](SystemConfig& c, double s) { c.delta_nu[0] *= s; }, -1);
  sweep([](SystemConfig& c, double s) { c.rabi_drive_amp *= s; }, -2);
  sweep([](SystemConfig& c, double s) { c.rabi_mode_amp[0] *= s; }, -2);
  sweep([](SystemConfig& c, double s) { *c.omega_r *= s; }, -1);
  return {worst < 1e-14, fmt("max relative deviation from the power laws %.3g", worst)};
}

}  // namespace

int main() {
  std::printf("simd: %s, workers: %d\n", std::string(to_string(simd::active_kernels().isa)).c_str(), worker_count());
  report(1, "Bose-Einstein end-to-end", bose_einstein);
  report(2, "squeezed vacuum end-to-end", squeezed_vacuum);
  report(3, "two-mode squeezed correlation", two_mode_squeezed);
  report(4, "hafnian oracle equivalence", hafnian_equivalence);
  const std::vector<Instance> suite = random_suite();
  report(5, "symplectic and decomposition suite", [&] { return decomposition_suite(suite); });
  report(6, "normalization and moments", [&] { return normalization(suite); });
  report(7, "sampler statistics and reproducibility", sampler_statistics);
  report(8, "scattering-time scaling", scattering_time);
  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
