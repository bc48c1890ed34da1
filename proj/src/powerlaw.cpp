#include "renydiv/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "renydiv/errors.hpp"

namespace renydiv {

PowerLawModel::PowerLawModel(double beta_, std::size_t m_) : beta(beta_), m(m_) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("power-law exponent must be positive");
  if (m == 0) throw DomainError("power law needs m >= 1");
  CompensatedSum h;
  for (std::size_t i = 1; i <= m; ++i) h += std::pow(static_cast<double>(i), -beta);
  h_norm = h.value();
}

ProbVector PowerLawModel::pmf() const {
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = std::pow(static_cast<double>(i + 1), -beta);
  return ProbVector::normalized(w);
}

ProbVector powerlaw_pmf(double beta, std::size_t m) { return PowerLawModel(beta, m).pmf(); }

FitResult fit_powerlaw_ls(const CountVector& c) {
  std::vector<double> y;
  for (auto v : c.counts()) {
    if (v > 0) y.push_back(static_cast<double>(v));
  }
  if (y.size() < 3) throw DomainError("power-law fit needs at least 3 positive counts");
  std::sort(y.begin(), y.end(), std::greater<>());
  const std::size_t k = y.size();
  std::vector<double> x(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = std::log(static_cast<double>(i + 1));
    y[i] = std::log(y[i]);
  }
  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t i = 0; i < k; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx.value() / static_cast<double>(k);
  const double my = sy.value() / static_cast<double>(k);
  CompensatedSum sxx;
  CompensatedSum sxy;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy.value() / sxx.value();
  const double intercept = my - slope * mx;
  CompensatedSum sse;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - intercept - slope * x[i];
    sse += r * r;
  }
  FitResult fit;
  fit.beta_hat = -slope;
  fit.residual_sse = sse.value();
  fit.std_error = std::sqrt(sse.value() / static_cast<double>(k - 2) / sxx.value());
  fit.intercept = intercept;
  fit.ranks_used = k;
  return fit;
}

namespace {

// Smallest rank r (1-based) with cdf[r-1] >= u.
double rank_quantile(const std::vector<double>& cdf, double u) {
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<double>(it - cdf.begin() + 1);
}

std::vector<double> cumulative(const std::vector<double>& w) {
  std::vector<double> cdf(w.size());
  CompensatedSum run;
  double total = 0.0;
  for (double v : w) total += v;
  for (std::size_t i = 0; i < w.size(); ++i) {
    run += w[i];
    cdf[i] = run.value() / total;
  }
  return cdf;
}

}  // namespace

std::vector<std::pair<double, double>> powerlaw_qq(std::span<const std::uint64_t> counts, const PowerLawModel& model) {
  std::vector<double> observed;
  for (auto v : counts) {
    if (v > 0) observed.push_back(static_cast<double>(v));
  }
  std::vector<std::pair<double, double>> out;
  if (observed.empty()) return out;
  std::sort(observed.begin(), observed.end(), std::greater<>());
  const std::vector<double> emp_cdf = cumulative(observed);
  const std::vector<double> model_cdf = cumulative(model.pmf().values());
  const std::size_t g = observed.size();
  out.reserve(g);
  for (std::size_t k = 1; k <= g; ++k) {
    const double u = (static_cast<double>(k) - 0.5) / static_cast<double>(g);
    out.emplace_back(rank_quantile(model_cdf, u), rank_quantile(emp_cdf, u));
  }
  return out;
}

}  // namespace renydiv
