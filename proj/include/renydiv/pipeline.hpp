#pragma once

// Noise filtering under a uniform-block noise + signal mixture, the two-sample
// diversity comparison workflow built on it, and a multi-pair homogeneity
// test.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "renydiv/asymptotics.hpp"
#include "renydiv/powerlaw.hpp"

namespace renydiv {

struct NoiseComponent {
  std::vector<std::size_t> categories;  // category indices, ascending
  std::uint64_t min_count = 0;
  std::uint64_t max_count = 0;
  std::uint64_t total = 0;
  double level = 0.0;  // fitted per-category probability of the uniform block
};

struct MixtureDecomposition {
  std::uint64_t cutoff_k_m = 0;  // largest count absorbed into noise, 0 if none
  std::vector<NoiseComponent> noise_components;
  std::vector<std::size_t> signal_categories;
  double noise_fraction = 0.0;
  double signal_fraction = 1.0;
  std::size_t m_signal = 0;
  std::uint64_t n = 0;
};

inline constexpr double kDefaultNoiseLevel = 0.01;
inline constexpr std::size_t kDefaultMaxComponents = 2;

// Sequential uniform-block noise filter. Observed categories are grouped by
// count value and absorbed from the lowest count upward; each absorption is
// checked with the standardized Pearson uniformity statistic (upper tail at
// significance `level`). A rejection closes the current block and starts a
// new one at the rejected stratum. The scan stops after `max_components`
// blocks are closed, or when a block holding a single count stratum cannot
// absorb the next one; everything from there upward is signal.
// Zero-count categories belong to neither part.
MixtureDecomposition filter_noise(const CountVector& c, double level = kDefaultNoiseLevel,
                                  std::size_t max_components = kDefaultMaxComponents);

struct PipelineConfig {
  double noise_level = kDefaultNoiseLevel;
  std::size_t max_components = kDefaultMaxComponents;
  double ci_level = 0.95;
  double test_level = 0.05;  // equality is rejected when p < test_level
};

struct PipelineReport {
  double alpha = 0.5;
  std::vector<MixtureDecomposition> decomposition;  // one per sample
  std::uint64_t shared_cutoff = 0;                  // max of the per-sample cutoffs
  std::vector<std::size_t> signal_support;          // categories kept in both samples
  std::vector<std::uint64_t> signal_n;              // signal total per sample
  TestReport equality;
  std::optional<EstimateWithCI> divergence;  // present iff equality rejected
  std::vector<EstimateWithCI> entropies;
  std::vector<EstimateWithCI> hill_numbers;
  std::vector<std::optional<FitResult>> powerlaw_fits;  // absent when fewer than 3 signal ranks
  PipelineConfig config;

  bool equality_rejected() const noexcept { return equality.p_value < config.test_level; }
};

// Filter both samples, keep categories above the shared cutoff in both,
// test equality of the renormalized signal, and quantify the difference
// when equality is rejected. Throws NoSignalError if no category survives.
PipelineReport diversity_pipeline(const CountVector& cx, const CountVector& cy, Alpha alpha,
                                  const PipelineConfig& config = {});

// H0: every pair has equal marginals. Q = sum of squared per-pair
// degenerate-divergence statistics, referred to chi-square(k).
TestReport homogeneity_test(const std::vector<std::pair<CountVector, CountVector>>& pairs, Alpha alpha);

}  // namespace renydiv
