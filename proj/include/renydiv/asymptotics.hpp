#pragma once

// Plug-in estimation with CLT-based confidence intervals, chi-square
// statistics and hypothesis tests for Renyi entropy and divergence in the
// regime where the number of categories grows with the sample size.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "renydiv/core_measures.hpp"
#include "renydiv/projections.hpp"
#include "renydiv/random.hpp"

namespace renydiv {

// Observed category counts of one sample. Invariant: n = sum(counts) >= 1.
class CountVector {
 public:
  explicit CountVector(std::vector<std::uint64_t> counts);

  std::size_t size() const noexcept { return counts_.size(); }
  std::uint64_t n() const noexcept { return n_; }
  std::uint64_t operator[](std::size_t i) const noexcept { return counts_[i]; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::size_t observed_categories() const noexcept;

  ProbVector frequencies() const { return ProbVector::from_counts(counts_); }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_;
};

// Sparse counts of paired observations (X_k, Y_k) over an m x m table.
class JointCountTable {
 public:
  using Cells = std::map<std::pair<std::size_t, std::size_t>, std::uint64_t>;

  explicit JointCountTable(std::size_t m);

  void add(std::size_t row, std::size_t col, std::uint64_t count);

  std::size_t m() const noexcept { return m_; }
  std::uint64_t n() const noexcept { return n_; }
  const Cells& cells() const noexcept { return cells_; }
  std::uint64_t at(std::size_t row, std::size_t col) const;
  CountVector row_counts() const;
  CountVector col_counts() const;

 private:
  std::size_t m_;
  std::uint64_t n_ = 0;
  Cells cells_;
};

enum class CiMethod { thm1, thm2, thm3, thm4 };
enum class TestMethod { lemma2i, lemma2ii, thm3, thm4, chi2_homogeneity };
enum class Sidedness { two_sided, upper };

std::string_view to_string(CiMethod m) noexcept;
std::string_view to_string(TestMethod m) noexcept;
std::string_view to_string(Sidedness s) noexcept;

struct EstimateWithCI {
  double estimate = 0.0;
  double level = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::size_t m = 0;
  CiMethod method = CiMethod::thm1;
  std::optional<LDReport> diagnostics;
};

// `statistic` is standardized against its reference law (N(0,1), or
// chi-square(k) for homogeneity). For the normal-reference tests,
// statistic = (raw_statistic - null_mean) / null_sd.
struct TestReport {
  double statistic = 0.0;
  double raw_statistic = 0.0;
  double null_mean = 0.0;
  double null_sd = 1.0;
  double p_value = 1.0;
  Sidedness sidedness = Sidedness::two_sided;
  std::size_t m = 0;
  std::uint64_t n = 0;
  TestMethod method = TestMethod::lemma2i;
};

// n * sum (phat_i - p_i)^2 / p_i. p must be strictly positive.
double pearson_chi_square(const CountVector& c, const ProbVector& p);

// n * sum (phat_i - qhat_i)^2 / (2 p_i) with phat, qhat the row and column
// frequencies of the joint table.
double two_sample_chi_square(const JointCountTable& joint, const ProbVector& p);

struct ChiSquareNullParams {
  double mu = 0.0;
  double gamma_sq = 0.0;
};
inline constexpr double kEqualMarginalTolerance = 1e-9;
// Centering and scale of the two-sample chi-square under equal marginals.
ChiSquareNullParams chi_square_null_params(const JointDistribution& joint);

// Generalized binomial coefficient a (a-1) ... (a-k+1) / k!.
double generalized_binomial(double a, unsigned k);

// Plug-in Renyi entropy with a normal-theory interval. Throws DegenerateError
// when the plug-in distribution is uniform (see uniformity_test).
EstimateWithCI entropy_ci(const CountVector& c, Alpha alpha, double level);
// Hill number interval, the exponential image of entropy_ci.
EstimateWithCI hill_ci(const CountVector& c, Alpha alpha, double level);

// Plug-in Renyi divergence D(phat, qhat) with a normal-theory interval.
// Two count vectors are treated as independent samples (unequal sizes are
// allowed); a joint table uses the paired projection V directly.
// Throws DegenerateError when phat = qhat.
EstimateWithCI divergence_ci(const CountVector& cx, const CountVector& cy, Alpha alpha, double level);
EstimateWithCI divergence_ci(const JointCountTable& joint, Alpha alpha, double level);

enum class UniformityMethod { entropy, pearson };

// Standardized uniform-entropy statistic (needs n > m) and standardized
// Pearson statistic against uniform(m), m = c.size().
double uniform_entropy_statistic(const CountVector& c, Alpha alpha);
double pearson_uniformity_statistic(const CountVector& c);

// Two-sided test of H0: p = uniform(m).
TestReport uniformity_test(const CountVector& c, Alpha alpha, UniformityMethod method = UniformityMethod::entropy);

// Degenerate-divergence test of H0: p = q, one-sided upper.
// Independent mode: two separate samples, mu = gamma^2 = m - 1.
TestReport equality_test(const CountVector& cx, const CountVector& cy, Alpha alpha);
// Paired mode: mu, gamma^2 estimated from the smoothed plug-in joint.
TestReport equality_test(const JointCountTable& joint, Alpha alpha);

// Retains each observation independently with probability tau.
CountVector binomial_thinning(const CountVector& c, double tau, RandomStream& stream);

}  // namespace renydiv
