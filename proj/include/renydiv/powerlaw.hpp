#pragma once

// Zipf-type power laws p_i = i^(-beta) / H(beta, m), rank-frequency least
// squares fitting and QQ data against a fitted model.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "renydiv/asymptotics.hpp"
#include "renydiv/core_measures.hpp"

namespace renydiv {

struct PowerLawModel {
  double beta = 0.0;
  std::size_t m = 0;
  double h_norm = 0.0;  // sum_{i=1}^m i^(-beta)

  PowerLawModel(double beta, std::size_t m);
  ProbVector pmf() const;
};

ProbVector powerlaw_pmf(double beta, std::size_t m);

struct FitResult {
  double beta_hat = 0.0;
  double std_error = 0.0;
  double residual_sse = 0.0;
  double intercept = 0.0;
  std::size_t ranks_used = 0;
};

// OLS of log(count) on log(rank) over the positive counts sorted in
// decreasing order; beta_hat is minus the slope.
FitResult fit_powerlaw_ls(const CountVector& c);

// (model quantile, empirical quantile) pairs of the rank distribution at
// probabilities (k - 0.5)/G, k = 1..G, with G the number of observed
// categories. Empty when nothing is observed.
std::vector<std::pair<double, double>> powerlaw_qq(std::span<const std::uint64_t> counts, const PowerLawModel& model);

}  // namespace renydiv
