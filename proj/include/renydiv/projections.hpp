#pragma once

// Projection variables W (one distribution) and V (a bivariate joint) whose
// variances drive the non-degenerate CLTs, plus finite-n diagnostics for the
// asymptotic applicability conditions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "renydiv/core_measures.hpp"

namespace renydiv {

// Dense m x m bivariate distribution P(X = i, Y = j) with its marginals.
// Row marginal is the distribution of X, column marginal that of Y.
class JointDistribution {
 public:
  // `cells` is row-major, size m * m, non-negative and summing to 1.
  JointDistribution(std::size_t m, std::vector<double> cells);

  static JointDistribution product(const ProbVector& p, const ProbVector& q);
  // Equal-marginal mixture (1 - rho) p_i p_j + rho p_i 1{i = j}, rho in [0, 1].
  static JointDistribution correlated(const ProbVector& p, double rho);

  std::size_t m() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return cells_[i * m_ + j]; }
  const std::vector<double>& cells() const noexcept { return cells_; }
  const ProbVector& row_marginal() const noexcept { return row_; }
  const ProbVector& col_marginal() const noexcept { return col_; }

 private:
  std::size_t m_;
  std::vector<double> cells_;
  ProbVector row_;
  ProbVector col_;
};

struct ProjectionMoments {
  double mean = 0.0;
  double variance = 0.0;
  double cv = 0.0;  // sqrt(variance) / |mean|
};

// W takes the value alpha p_i^(alpha-1) with probability p_i. Every p_i must
// be positive.
ProjectionMoments projection_w_moments(const ProbVector& p, Alpha alpha);

// V takes alpha (q_i/p_i)^(1-alpha) + (1-alpha) (p_j/q_j)^alpha with
// probability p_ij, where p, q are the row and column marginals. Both
// marginals must be strictly positive.
ProjectionMoments projection_v_moments(const JointDistribution& joint, Alpha alpha);

// The two additive pieces of V for an independent pair (X ~ p, Y ~ q):
// A = alpha (q_X/p_X)^(1-alpha) and B = (1-alpha) (p_Y/q_Y)^alpha.
// Var V = var_a + var_b for the product joint. Categories where either
// probability is zero carry no weight and are skipped.
struct SplitProjection {
  double mean = 0.0;  // E A + E B = S_alpha(p, q)
  double var_a = 0.0;
  double var_b = 0.0;
};
SplitProjection split_projection_v(const ProbVector& p, const ProbVector& q, Alpha alpha);

enum class Advisory { pass, marginal, fail, not_applicable };
std::string_view to_string(Advisory a) noexcept;

// Quotients below this are reported as pass, below kMarginalThreshold as marginal.
inline constexpr double kPassThreshold = 0.1;
inline constexpr double kMarginalThreshold = 0.5;
Advisory classify_condition(std::optional<double> quotient) noexcept;

struct LDReport {
  double p_star = 0.0;    // smallest positive mass over both marginals
  double ld_ratio = 0.0;  // 1 / (n p_star)
  double m_over_n = 0.0;
  double m_sq_over_n = 0.0;  // uniform-entropy regime requires this -> 0
  // sum p_i^(alpha-1) / sqrt(n Var W); absent when Var W = 0.
  std::optional<double> entropy_condition;
  // (sum (q/p)^(1-alpha) + sum (p/q)^alpha) / sqrt(n Var V); needs q and Var V > 0.
  std::optional<double> divergence_condition;
  // max{1/(n m p_star^2), m/(n p_star)}; needs q.
  std::optional<double> degenerate_divergence_condition;

  Advisory ld_advisory = Advisory::not_applicable;
  Advisory entropy_advisory = Advisory::not_applicable;
  Advisory divergence_advisory = Advisory::not_applicable;
  Advisory uniform_advisory = Advisory::not_applicable;
  Advisory degenerate_divergence_advisory = Advisory::not_applicable;
};

// Finite-n values of the asymptotic conditions. Only categories with positive
// mass are considered; never throws for valid p, q and n >= 1.
LDReport ld_diagnostic(const ProbVector& p, std::uint64_t n, Alpha alpha);
LDReport ld_diagnostic(const ProbVector& p, const ProbVector& q, std::uint64_t n, Alpha alpha);

}  // namespace renydiv
