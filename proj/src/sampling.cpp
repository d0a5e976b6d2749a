#include "hybrid/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

#include <boost/math/special_functions/gamma.hpp>

#include "hybrid/hafnian.hpp"
#include "hybrid/parallel.hpp"

namespace hybrid {

namespace {

constexpr std::size_t kOutcomeChunk = 64;
constexpr double kRepeatedRoundoff = 1e-16;
constexpr double kAbsoluteBudget = 1e-14;

std::vector<std::string> labels_for(Partition p) {
  std::vector<std::string> labels;
  for (int l = 0; l < p.atoms; ++l) labels.push_back("N" + std::to_string(l + 1));
  for (int nu = 0; nu < p.photons; ++nu) labels.push_back("q" + std::to_string(nu + 1));
  return labels;
}

}  // namespace

CountsVector OutcomeDistribution::counts_at(std::size_t index) const {
  const std::size_t radix = static_cast<std::size_t>(cutoff) + 1;
  CountsVector counts(modes.size());
  for (std::size_t j = counts.size(); j-- > 0;) {
    counts[j] = static_cast<int>(index % radix);
    index /= radix;
  }
  return counts;
}

std::size_t OutcomeDistribution::index_of(const CountsVector& counts) const {
  if (counts.size() != modes.size()) throw DimensionError("counts vector does not match the distribution");
  std::size_t index = 0;
  for (int m : counts) {
    if (m < 0 || m > cutoff) throw DimensionError("counts outside the enumerated lattice");
    index = index * (static_cast<std::size_t>(cutoff) + 1) + static_cast<std::size_t>(m);
  }
  return index;
}

Probability evaluate_probability(const GaussianState& g, const CountsVector& counts, const Tolerances& tol) {
  if (static_cast<int>(counts.size()) != g.modes()) {
    throw DimensionError("counts vector has " + std::to_string(counts.size()) + " entries, expected " +
                         std::to_string(g.modes()));
  }
  double box = 1.0;
  for (int m : counts) box *= (m + 1.0) * (m + 1.0);
  cplx rho;
  if (box <= static_cast<double>(kRecursiveMaxEntries)) {
    rho = scaled_hafnian_recursive(g.C, counts) * std::exp(-g.log_norm);
  } else {
    // Inclusion-exclusion loses about magnitude / |haf| in relative precision.
    double magnitude = 0.0;
    const cplx haf = hafnian_repeated(g.C, counts, &magnitude);
    double log_denominator = g.log_norm;
    for (int m : counts) log_denominator += std::lgamma(m + 1.0);
    const double scale = std::exp(-log_denominator);
    if (kRepeatedRoundoff * magnitude * scale > kAbsoluteBudget) {
      throw SizeError("outcome needs " + std::to_string(box) +
                      " recursion entries and inclusion-exclusion cancels beyond double precision");
    }
    rho = haf * scale;
  }

  Probability p;
  p.raw = rho.real();
  p.imaginary = rho.imag();
  if (std::abs(rho.imag()) > tol.imaginary * std::max(std::abs(rho), 1e-6)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "probability has imaginary part %.3g (real part %.3g)", rho.imag(), rho.real());
    throw ImaginaryResidualError(buf);
  }
  if (p.raw < -tol.negative_clamp) {
    throw NegativeProbabilityError("negative probability " + std::to_string(p.raw));
  }
  p.clamped = p.raw < 0.0;
  p.value = p.clamped ? 0.0 : p.raw;
  return p;
}

double outcome_probability(const GaussianState& g, const CountsVector& counts, const Tolerances& tol) {
  return evaluate_probability(g, counts, tol).value;
}

std::uint64_t state_fingerprint(const GaussianState& g) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto feed = [&](double value) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &value, sizeof(double));
    for (unsigned char b : bytes) {
      hash ^= b;
      hash *= 0x100000001b3ULL;
    }
  };
  for (Eigen::Index c = 0; c < g.G.cols(); ++c) {
    for (Eigen::Index r = 0; r < g.G.rows(); ++r) {
      feed(g.G(r, c).real());
      feed(g.G(r, c).imag());
    }
  }
  feed(g.temperature);
  return hash;
}

OutcomeDistribution enumerate_distribution(const GaussianState& g, int cutoff, const Tolerances& tol,
                                           int threads) {
  if (cutoff < 0) throw ConfigError("cutoff", "must be >= 0");
  const int M = g.modes();
  double lattice = 1.0;
  for (int j = 0; j < M; ++j) lattice *= cutoff + 1.0;
  if (lattice > static_cast<double>(kMaxOutcomes)) {
    throw BudgetError("outcome lattice (cutoff + 1)^M = " + std::to_string(cutoff + 1) + "^" + std::to_string(M) +
                      " exceeds " + std::to_string(kMaxOutcomes) + " outcomes; lower the cutoff or the mode count");
  }

  OutcomeDistribution dist;
  dist.cutoff = cutoff;
  for (int j = 0; j < M; ++j) dist.modes.push_back(j);
  dist.labels = labels_for(g.partition);
  dist.fingerprint = state_fingerprint(g);
  const std::size_t total = static_cast<std::size_t>(lattice);
  dist.probabilities.assign(total, 0.0);
  std::vector<double> raw(total, 0.0);

  const std::size_t chunks = (total + kOutcomeChunk - 1) / kOutcomeChunk;
  parallel_for(chunks, worker_count(threads), [&](std::size_t chunk) {
    const std::size_t end = std::min(total, (chunk + 1) * kOutcomeChunk);
    for (std::size_t i = chunk * kOutcomeChunk; i < end; ++i) {
      const Probability p = evaluate_probability(g, dist.counts_at(i), tol);
      dist.probabilities[i] = p.value;
      raw[i] = p.raw;
    }
  });

  double sum = 0.0, compensation = 0.0;
  dist.min_raw_probability = total > 0 ? raw[0] : 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    if (raw[i] < 0.0) ++dist.clamped;
    dist.min_raw_probability = std::min(dist.min_raw_probability, raw[i]);
    const double y = dist.probabilities[i] - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  dist.captured_mass = sum;
  if (dist.captured_mass > 1.0 + 1e-9) {
    throw Error("captured mass " + std::to_string(dist.captured_mass) + " exceeds 1");
  }
  return dist;
}

OutcomeDistribution marginalize(const OutcomeDistribution& dist, std::vector<int> keep) {
  if (keep.empty()) throw ConfigError("keep", "marginal needs at least one mode");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.front() < 0 || keep.back() >= dist.dimension()) throw DimensionError("mode position out of range");

  OutcomeDistribution out;
  out.cutoff = dist.cutoff;
  for (int k : keep) {
    out.modes.push_back(dist.modes[static_cast<std::size_t>(k)]);
    out.labels.push_back(dist.labels[static_cast<std::size_t>(k)]);
  }
  out.captured_mass = dist.captured_mass;
  out.clamped = dist.clamped;
  out.min_raw_probability = dist.min_raw_probability;
  out.fingerprint = dist.fingerprint;

  std::size_t total = 1;
  for (std::size_t j = 0; j < keep.size(); ++j) total *= static_cast<std::size_t>(dist.cutoff) + 1;
  out.probabilities.assign(total, 0.0);
  CountsVector reduced(keep.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const CountsVector counts = dist.counts_at(i);
    for (std::size_t j = 0; j < keep.size(); ++j) reduced[j] = counts[static_cast<std::size_t>(keep[j])];
    out.probabilities[out.index_of(reduced)] += dist.probabilities[i];
  }
  return out;
}

std::vector<int> photon_positions(const OutcomeDistribution& dist, Partition partition) {
  std::vector<int> out;
  for (int k = 0; k < dist.dimension(); ++k) {
    if (dist.modes[static_cast<std::size_t>(k)] >= partition.atoms) out.push_back(k);
  }
  return out;
}

RVector distribution_means(const OutcomeDistribution& dist) {
  RVector means = RVector::Zero(dist.dimension());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const CountsVector counts = dist.counts_at(i);
    for (int j = 0; j < dist.dimension(); ++j) means(j) += counts[static_cast<std::size_t>(j)] * dist.probabilities[i];
  }
  return means;
}

int recommended_cutoff(const GaussianState& g) {
  const RVector n = mean_occupations(g);
  const double largest = n.size() > 0 ? n.maxCoeff() : 0.0;
  return std::max(1, static_cast<int>(std::ceil(10.0 * largest)));
}

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<CountsVector> sample(const OutcomeDistribution& dist, std::size_t count, std::uint64_t seed,
                                 int threads) {
  if (!(dist.captured_mass > 0.99)) {
    throw TruncationError("captured mass " + std::to_string(dist.captured_mass) +
                          " <= 0.99; raise the cutoff before sampling");
  }
  std::vector<double> cdf(dist.size());
  double running = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) cdf[i] = running += dist.probabilities[i];

  std::vector<CountsVector> out(count);
  constexpr std::size_t kBatch = 4096;
  const std::size_t batches = (count + kBatch - 1) / kBatch;
  parallel_for(batches, worker_count(threads), [&](std::size_t batch) {
    const std::size_t end = std::min(count, (batch + 1) * kBatch);
    for (std::size_t i = batch * kBatch; i < end; ++i) {
      const double u = static_cast<double>(splitmix64(seed, i) >> 11) * 0x1.0p-53;
      const double target = u * dist.captured_mass;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
      std::size_t index = static_cast<std::size_t>(it - cdf.begin());
      if (index >= cdf.size()) index = cdf.size() - 1;
      out[i] = dist.counts_at(index);
    }
  });
  return out;
}

ChiSquareResult chi_square(const OutcomeDistribution& dist, const std::vector<CountsVector>& samples) {
  if (samples.empty()) throw StatisticsError("no samples");
  const double n = static_cast<double>(samples.size());
  std::vector<double> observed(dist.size(), 0.0);
  for (const CountsVector& s : samples) observed[dist.index_of(s)] += 1.0;

  std::vector<double> expected_buckets, observed_buckets;
  double pooled_expected = 0.0, pooled_observed = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double expected = n * dist.probabilities[i] / dist.captured_mass;
    if (expected >= 20.0) {
      expected_buckets.push_back(expected);
      observed_buckets.push_back(observed[i]);
    } else {
      pooled_expected += expected;
      pooled_observed += observed[i];
    }
  }
  if (pooled_expected >= 20.0) {
    expected_buckets.push_back(pooled_expected);
    observed_buckets.push_back(pooled_observed);
  } else if (!expected_buckets.empty() && (pooled_expected > 0.0 || pooled_observed > 0.0)) {
    const auto smallest = std::min_element(expected_buckets.begin(), expected_buckets.end()) - expected_buckets.begin();
    expected_buckets[static_cast<std::size_t>(smallest)] += pooled_expected;
    observed_buckets[static_cast<std::size_t>(smallest)] += pooled_observed;
  }
  if (expected_buckets.size() < 2) {
    throw StatisticsError("fewer than two buckets with >= 20 expected counts; draw more samples");
  }

  ChiSquareResult result;
  for (std::size_t b = 0; b < expected_buckets.size(); ++b) {
    const double diff = observed_buckets[b] - expected_buckets[b];
    result.statistic += diff * diff / expected_buckets[b];
  }
  result.dof = static_cast<int>(expected_buckets.size()) - 1;
  result.p_value = boost::math::gamma_q(0.5 * result.dof, 0.5 * result.statistic);
  result.passed = result.p_value > 0.01;
  return result;
}

}  // namespace hybrid
