#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hybrid/gaussian.hpp"
#include "hybrid/tolerances.hpp"

namespace hybrid {

/// Exact outcome probabilities on the lattice 0 <= counts <= cutoff.
/// Outcomes are ordered lexicographically with the first mode most
/// significant.
struct OutcomeDistribution {
  int cutoff = 0;
  std::vector<int> modes;           // indices into the full mode list
  std::vector<std::string> labels;  // "N1".. for atoms, "q1".. for photons
  std::vector<double> probabilities;
  double captured_mass = 0.0;
  int clamped = 0;                  // tiny negative probabilities set to zero
  double min_raw_probability = 0.0;
  std::uint64_t fingerprint = 0;    // hash of G and T

  std::size_t size() const { return probabilities.size(); }
  int dimension() const { return static_cast<int>(modes.size()); }
  CountsVector counts_at(std::size_t index) const;
  std::size_t index_of(const CountsVector& counts) const;
};

struct Probability {
  double value = 0.0;     // after clamping
  double raw = 0.0;       // real part before clamping
  double imaginary = 0.0;
  bool clamped = false;
};

/// haf(C~) / (sqrt(det(1 + G)) prod m_j!). Throws ImaginaryResidualError when
/// |Im| > tol.imaginary * max(|value|, 1e-6) and NegativeProbabilityError below
/// -tol.negative_clamp.
Probability evaluate_probability(const GaussianState& g, const CountsVector& counts, const Tolerances& tol = {});

double outcome_probability(const GaussianState& g, const CountsVector& counts, const Tolerances& tol = {});

inline constexpr std::size_t kMaxOutcomes = 1'000'000;

OutcomeDistribution enumerate_distribution(const GaussianState& g, int cutoff, const Tolerances& tol = {},
                                           int threads = 0);

/// Sums out every mode not in `keep` (positions within dist.modes).
OutcomeDistribution marginalize(const OutcomeDistribution& dist, std::vector<int> keep);

/// Positions of the photon modes of a distribution over `partition`.
std::vector<int> photon_positions(const OutcomeDistribution& dist, Partition partition);

/// Sum_counts counts * probability, per mode.
RVector distribution_means(const OutcomeDistribution& dist);

/// Smallest cutoff >= 10 max n_j (at least 1).
int recommended_cutoff(const GaussianState& g);

std::uint64_t state_fingerprint(const GaussianState& g);

/// SplitMix64 output for stream position `index` of `seed`.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index);

/// Inverse-CDF draws. Draw i uses the uniform from splitmix64(seed, i), so the
/// result does not depend on the worker count. Throws TruncationError when
/// captured_mass <= 0.99.
std::vector<CountsVector> sample(const OutcomeDistribution& dist, std::size_t count, std::uint64_t seed,
                                 int threads = 0);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
  bool passed = false;  // p > 0.01
};

/// Pearson test; outcomes expecting fewer than 20 draws are pooled.
ChiSquareResult chi_square(const OutcomeDistribution& dist, const std::vector<CountsVector>& samples);

}  // namespace hybrid
