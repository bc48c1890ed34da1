#pragma once

// Seeded triangular-array simulation: draws samples of size n = m^(1+eps)
// from a family of populations, evaluates a normalized statistic per
// replicate, and summarizes agreement with N(0,1).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "renydiv/asymptotics.hpp"
#include "renydiv/core_measures.hpp"
#include "renydiv/projections.hpp"
#include "renydiv/random.hpp"

namespace renydiv {

enum class Family { power_law, uniform, noise_and_signal, mixture, bivariate_product, bivariate_joint };

enum class Statistic {
  thm1_entropy,
  thm2_divergence,
  thm3_uniform_entropy,
  thm4_degenerate_divergence,
  lemma2_pearson,
  lemma2_two_sample,
};

std::string_view to_string(Family f) noexcept;
std::string_view to_string(Statistic s) noexcept;
std::optional<Family> family_from_string(std::string_view s) noexcept;
std::optional<Statistic> statistic_from_string(std::string_view s) noexcept;

// A uniform noise block: `categories` cells sharing total probability `mass`.
struct NoiseBlock {
  std::size_t categories = 0;
  double mass = 0.0;

  bool operator==(const NoiseBlock&) const = default;
};

inline constexpr std::uint64_t kDefaultMasterSeed = 20240611;

struct SimConfig {
  Family family = Family::power_law;
  double beta = 1.0;   // power_law, mixture signal, bivariate first marginal
  double beta2 = 1.0;  // bivariate_product second marginal
  double rho = 0.5;    // bivariate_joint: p_ij = (1 - rho) p_i p_j + rho p_i [i == j]
  double p0 = 0.5;     // noise_and_signal: mass of category 0, the rest uniform
  // mixture: the first m - sum(categories) cells carry a power law with total
  // mass 1 - sum(mass); the blocks follow in order.
  std::vector<NoiseBlock> noise_blocks;
  std::size_t m = 300;
  double epsilon = 1.5;
  std::optional<std::uint64_t> n_override;
  double alpha = 0.5;
  std::size_t B = 2000;
  Statistic statistic = Statistic::thm1_entropy;
  std::optional<double> thinning_tau;
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::size_t workers = 0;  // 0: hardware concurrency; never affects results

  // round(m^(1 + epsilon)) unless overridden.
  std::uint64_t n() const;
  bool bivariate() const noexcept { return family == Family::bivariate_product || family == Family::bivariate_joint; }
  // Throws UsageError on invalid fields or an incompatible family/statistic.
  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

// Population of a univariate family.
ProbVector population(const SimConfig& cfg);
// Population joint law of a bivariate family.
JointDistribution population_joint(const SimConfig& cfg);
// Marginals of a bivariate family.
std::pair<ProbVector, ProbVector> population_marginals(const SimConfig& cfg);

// Multinomial(n, p) by sequential conditional binomials.
CountVector sample_multinomial(const ProbVector& p, std::uint64_t n, RandomStream& stream);
JointCountTable sample_joint(const JointDistribution& joint, std::uint64_t n, RandomStream& stream);

struct SimRun {
  std::vector<double> samples;
  double ks_distance = 0.0;
  std::vector<std::pair<double, double>> qq_pairs;  // (normal quantile, sorted sample)
  SimConfig config_echo;
};

// Normalized statistic with true-parameter normalizers, one per replicate.
// Replicate r draws from RandomStream::child(master_seed, r).
SimRun simulate_statistic(const SimConfig& cfg);

// sup_x |F_B(x) - Phi(x)|. Needs at least 2 samples.
double ks_distance_normal(std::span<const double> samples);
std::vector<std::pair<double, double>> normal_qq_pairs(std::span<const double> samples);

// Fraction of replicates whose plug-in interval at `level` covers the true
// entropy (thm1_entropy) or divergence (thm2_divergence). A replicate whose
// interval cannot be formed counts as not covering.
double coverage_experiment(const SimConfig& cfg, double level);

struct BiasResult {
  double relative_bias = 0.0;  // E S(phat) / S(p) - 1, or the two-sample analogue
  double mcse = 0.0;
};
BiasResult bias_experiment(const SimConfig& cfg);

}  // namespace renydiv
