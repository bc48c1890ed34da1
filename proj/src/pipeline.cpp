#include "renydiv/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "renydiv/errors.hpp"
#include "renydiv/reference_distributions.hpp"

namespace renydiv {

namespace {

// Running sums of a candidate block, enough for the Pearson uniformity
// statistic sum (c - T/k)^2 / (T/k) = k * SS / T - T.
struct Block {
  std::vector<std::size_t> categories;
  std::uint64_t min_count = 0;
  std::uint64_t max_count = 0;
  double total = 0.0;
  double sum_sq = 0.0;
  std::size_t strata = 0;

  bool empty() const { return categories.empty(); }

  void absorb(std::uint64_t count, const std::vector<std::size_t>& cats) {
    if (empty()) min_count = count;
    max_count = count;
    const double c = static_cast<double>(count);
    const double k = static_cast<double>(cats.size());
    total += c * k;
    sum_sq += c * c * k;
    categories.insert(categories.end(), cats.begin(), cats.end());
    ++strata;
  }
};

// Standardized Pearson statistic of `block` plus `cats` at `count`, against
// uniformity over the combined categories.
double uniformity_z(const Block& block, std::uint64_t count, std::size_t n_cats) {
  const double c = static_cast<double>(count);
  const double k = static_cast<double>(block.categories.size() + n_cats);
  const double total = block.total + c * static_cast<double>(n_cats);
  const double sum_sq = block.sum_sq + c * c * static_cast<double>(n_cats);
  const double x2 = std::max(k * sum_sq / total - total, 0.0);
  const double df = k - 1.0;
  return (x2 - df) / std::sqrt(2.0 * df);
}

NoiseComponent close(Block& b, double n) {
  NoiseComponent comp;
  std::sort(b.categories.begin(), b.categories.end());
  comp.categories = std::move(b.categories);
  comp.min_count = b.min_count;
  comp.max_count = b.max_count;
  comp.total = static_cast<std::uint64_t>(std::llround(b.total));
  comp.level = b.total / n / static_cast<double>(comp.categories.size());
  b = Block{};
  return comp;
}

}  // namespace

MixtureDecomposition filter_noise(const CountVector& c, double level, std::size_t max_components) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("noise test level must lie in (0, 1)");
  if (max_components == 0) throw DomainError("max_components must be at least 1");
  std::map<std::uint64_t, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] > 0) strata[c[i]].push_back(i);
  }
  const double critical = normal_quantile(1.0 - level);
  const double n = static_cast<double>(c.n());

  MixtureDecomposition d;
  d.n = c.n();
  Block block;
  auto it = strata.begin();
  bool stopped = false;
  for (; it != strata.end(); ++it) {
    const auto& [count, cats] = *it;
    if (block.empty()) {
      block.absorb(count, cats);
      continue;
    }
    if (uniformity_z(block, count, cats.size()) <= critical) {
      block.absorb(count, cats);
      continue;
    }
    if (block.strata == 1) {
      // Two adjacent count values cannot be pooled: the signal starts at the
      // stratum held in `block`.
      it = strata.find(block.min_count);
      block = Block{};
      stopped = true;
      break;
    }
    d.noise_components.push_back(close(block, n));
    if (d.noise_components.size() == max_components) {
      stopped = true;
      break;
    }
    block.absorb(count, cats);
  }
  if (!stopped && !block.empty()) d.noise_components.push_back(close(block, n));

  std::uint64_t noise_total = 0;
  for (const auto& comp : d.noise_components) {
    noise_total += comp.total;
    d.cutoff_k_m = std::max(d.cutoff_k_m, comp.max_count);
  }
  if (stopped) {
    for (; it != strata.end(); ++it) {
      d.signal_categories.insert(d.signal_categories.end(), it->second.begin(), it->second.end());
    }
    std::sort(d.signal_categories.begin(), d.signal_categories.end());
  }
  d.m_signal = d.signal_categories.size();
  d.noise_fraction = static_cast<double>(noise_total) / n;
  d.signal_fraction = static_cast<double>(c.n() - noise_total) / n;
  return d;
}

PipelineReport diversity_pipeline(const CountVector& cx, const CountVector& cy, Alpha alpha,
                                  const PipelineConfig& config) {
  if (cx.size() != cy.size()) throw ShapeError("samples must share the category universe");
  PipelineReport rep;
  rep.alpha = alpha.value();
  rep.config = config;
  rep.decomposition.push_back(filter_noise(cx, config.noise_level, config.max_components));
  rep.decomposition.push_back(filter_noise(cy, config.noise_level, config.max_components));
  rep.shared_cutoff = std::max(rep.decomposition[0].cutoff_k_m, rep.decomposition[1].cutoff_k_m);

  for (std::size_t i = 0; i < cx.size(); ++i) {
    if (cx[i] > rep.shared_cutoff && cy[i] > rep.shared_cutoff) rep.signal_support.push_back(i);
  }
  if (rep.signal_support.empty()) {
    throw NoSignalError("no category exceeds the noise cutoff " + std::to_string(rep.shared_cutoff) +
                        " in both samples");
  }
  std::vector<std::uint64_t> sx;
  std::vector<std::uint64_t> sy;
  for (auto i : rep.signal_support) {
    sx.push_back(cx[i]);
    sy.push_back(cy[i]);
  }
  const CountVector signal_x(std::move(sx));
  const CountVector signal_y(std::move(sy));
  rep.signal_n = {signal_x.n(), signal_y.n()};

  rep.equality = equality_test(signal_x, signal_y, alpha);
  if (rep.equality_rejected()) rep.divergence = divergence_ci(signal_x, signal_y, alpha, config.ci_level);
  for (const CountVector* s : {&signal_x, &signal_y}) {
    rep.entropies.push_back(entropy_ci(*s, alpha, config.ci_level));
    rep.hill_numbers.push_back(hill_ci(*s, alpha, config.ci_level));
    rep.powerlaw_fits.push_back(s->observed_categories() >= 3 ? std::optional(fit_powerlaw_ls(*s)) : std::nullopt);
  }
  return rep;
}

TestReport homogeneity_test(const std::vector<std::pair<CountVector, CountVector>>& pairs, Alpha alpha) {
  if (pairs.size() < 2) throw UsageError("homogeneity test needs at least 2 sample pairs");
  TestReport rep;
  double q = 0.0;
  for (const auto& [x, y] : pairs) {
    const TestReport t = equality_test(x, y, alpha);
    q += t.statistic * t.statistic;
    rep.m = std::max(rep.m, t.m);
    rep.n += t.n;
  }
  const double k = static_cast<double>(pairs.size());
  rep.statistic = q;
  rep.raw_statistic = q;
  rep.null_mean = k;
  rep.null_sd = std::sqrt(2.0 * k);
  rep.p_value = chi_square_sf(q, k);
  rep.sidedness = Sidedness::upper;
  rep.method = TestMethod::chi2_homogeneity;
  return rep;
}

}  // namespace renydiv
