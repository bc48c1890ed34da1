#include "renydiv/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "renydiv/errors.hpp"
#include "renydiv/powerlaw.hpp"
#include "renydiv/reference_distributions.hpp"

namespace renydiv {

namespace {

constexpr std::pair<Family, std::string_view> kFamilies[] = {
    {Family::power_law, "power_law"},
    {Family::uniform, "uniform"},
    {Family::noise_and_signal, "noise_and_signal"},
    {Family::mixture, "mixture"},
    {Family::bivariate_product, "bivariate_product"},
    {Family::bivariate_joint, "bivariate_joint"},
};

constexpr std::pair<Statistic, std::string_view> kStatistics[] = {
    {Statistic::thm1_entropy, "thm1_entropy"},
    {Statistic::thm2_divergence, "thm2_divergence"},
    {Statistic::thm3_uniform_entropy, "thm3_uniform_entropy"},
    {Statistic::thm4_degenerate_divergence, "thm4_degenerate_divergence"},
    {Statistic::lemma2_pearson, "lemma2_pearson"},
    {Statistic::lemma2_two_sample, "lemma2_two_sample"},
};

bool univariate_statistic(Statistic s) {
  return s == Statistic::thm1_entropy || s == Statistic::thm3_uniform_entropy || s == Statistic::lemma2_pearson;
}

bool equal_marginal_statistic(Statistic s) {
  return s == Statistic::thm4_degenerate_divergence || s == Statistic::lemma2_two_sample;
}

// Multinomial counts over `probs` (summing to 1) by conditional binomials.
std::vector<std::uint64_t> multinomial_counts(std::span<const double> probs, std::uint64_t n, RandomStream& stream) {
  const std::size_t k = probs.size();
  std::vector<double> tail(k + 1, 0.0);
  for (std::size_t i = k; i-- > 0;) tail[i] = tail[i + 1] + probs[i];
  std::size_t last = k;
  for (std::size_t i = k; i-- > 0;) {
    if (probs[i] > 0.0) {
      last = i;
      break;
    }
  }
  std::vector<std::uint64_t> out(k, 0);
  std::uint64_t left = n;
  for (std::size_t i = 0; i < k && left > 0; ++i) {
    if (!(probs[i] > 0.0)) continue;
    if (i == last) {
      out[i] = left;
      break;
    }
    const std::uint64_t x = stream.binomial(left, std::min(1.0, probs[i] / tail[i]));
    out[i] = x;
    left -= x;
  }
  return out;
}

template <class F>
std::vector<double> run_replicates(const SimConfig& cfg, F&& replicate) {
  const std::size_t b = cfg.B;
  std::vector<double> out(b);
  std::size_t workers = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, b);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::exception_ptr error;
  std::size_t error_index = b;
  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= b || failed.load()) return;
      try {
        RandomStream stream = RandomStream::child(cfg.master_seed, r);
        out[r] = replicate(stream);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(mu);
        if (r < error_index) {
          error_index = r;
          error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::uint64_t draw_size(const SimConfig& cfg, RandomStream& stream) {
  const std::uint64_t n = cfg.n();
  if (!cfg.thinning_tau) return n;
  const std::uint64_t kept = stream.binomial(n, *cfg.thinning_tau);
  if (kept == 0) throw DomainError("thinning removed every observation");
  return kept;
}

CountVector draw_univariate(const SimConfig& cfg, const ProbVector& p, RandomStream& stream) {
  CountVector c = sample_multinomial(p, cfg.n(), stream);
  if (cfg.thinning_tau) c = binomial_thinning(c, *cfg.thinning_tau, stream);
  return c;
}

// Marginal counts of n paired draws. For the correlated joint, a
// Binomial(n, rho) share of the pairs sits on the diagonal and contributes
// equally to both margins; the rest are independent draws.
std::pair<CountVector, CountVector> draw_bivariate(const SimConfig& cfg, const ProbVector& p, const ProbVector& q,
                                                   RandomStream& stream) {
  const std::uint64_t n = draw_size(cfg, stream);
  if (cfg.family == Family::bivariate_product) {
    CountVector cx = sample_multinomial(p, n, stream);
    CountVector cy = sample_multinomial(q, n, stream);
    return {std::move(cx), std::move(cy)};
  }
  const std::uint64_t diag = stream.binomial(n, cfg.rho);
  std::vector<std::uint64_t> d = multinomial_counts(p.values(), diag, stream);
  std::vector<std::uint64_t> x = multinomial_counts(p.values(), n - diag, stream);
  std::vector<std::uint64_t> y = multinomial_counts(q.values(), n - diag, stream);
  for (std::size_t i = 0; i < d.size(); ++i) {
    x[i] += d[i];
    y[i] += d[i];
  }
  return {CountVector(std::move(x)), CountVector(std::move(y))};
}

double pearson_standardized(double x2, std::size_t m) {
  const double df = static_cast<double>(m) - 1.0;
  return (x2 - df) / std::sqrt(2.0 * df);
}

}  // namespace

std::string_view to_string(Family f) noexcept {
  for (const auto& [k, v] : kFamilies) {
    if (k == f) return v;
  }
  return "unknown";
}

std::string_view to_string(Statistic s) noexcept {
  for (const auto& [k, v] : kStatistics) {
    if (k == s) return v;
  }
  return "unknown";
}

std::optional<Family> family_from_string(std::string_view s) noexcept {
  for (const auto& [k, v] : kFamilies) {
    if (v == s) return k;
  }
  return std::nullopt;
}

std::optional<Statistic> statistic_from_string(std::string_view s) noexcept {
  for (const auto& [k, v] : kStatistics) {
    if (v == s) return k;
  }
  return std::nullopt;
}

std::uint64_t SimConfig::n() const {
  if (n_override) return *n_override;
  const double v = std::round(std::pow(static_cast<double>(m), 1.0 + epsilon));
  return v < 1.0 ? 0 : static_cast<std::uint64_t>(v);
}

void SimConfig::validate() const {
  if (B < 1) throw UsageError("B must be at least 1");
  if (m < 2) throw UsageError("m must be at least 2");
  if (!std::isfinite(epsilon)) throw UsageError("epsilon must be finite");
  if (n() < 1) throw UsageError("derived sample size n must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (thinning_tau && !(*thinning_tau > 0.0 && *thinning_tau < 1.0)) {
    throw UsageError("thinning_tau must lie in (0, 1)");
  }
  switch (family) {
    case Family::power_law:
    case Family::bivariate_product:
    case Family::bivariate_joint:
      if (!(beta > 0.0) || !(beta2 > 0.0)) throw UsageError("power-law exponents must be positive");
      break;
    case Family::noise_and_signal:
      if (!(p0 > 0.0 && p0 < 1.0)) throw UsageError("p0 must lie in (0, 1)");
      break;
    case Family::mixture: {
      if (noise_blocks.empty()) throw UsageError("mixture needs at least one noise block");
      std::size_t cats = 0;
      double mass = 0.0;
      for (const auto& blk : noise_blocks) {
        if (blk.categories == 0 || !(blk.mass > 0.0)) throw UsageError("noise blocks need categories > 0 and mass > 0");
        cats += blk.categories;
        mass += blk.mass;
      }
      if (cats >= m) throw UsageError("noise blocks leave no signal categories");
      if (!(mass < 1.0)) throw UsageError("noise blocks leave no signal mass");
      if (!(beta > 0.0)) throw UsageError("power-law exponents must be positive");
      break;
    }
    case Family::uniform:
      break;
  }
  if (family == Family::bivariate_joint && !(rho >= 0.0 && rho <= 1.0)) throw UsageError("rho must lie in [0, 1]");

  const std::string name(to_string(statistic));
  if (univariate_statistic(statistic) && bivariate()) {
    throw UsageError(name + " needs a univariate family, got " + std::string(to_string(family)));
  }
  if (!univariate_statistic(statistic) && !bivariate()) {
    throw UsageError(name + " needs a bivariate family, got " + std::string(to_string(family)));
  }
  if (statistic == Statistic::thm3_uniform_entropy && family != Family::uniform) {
    throw UsageError("thm3_uniform_entropy needs the uniform family");
  }
  const bool equal_marginals = family == Family::bivariate_joint || beta == beta2;
  if (equal_marginal_statistic(statistic) && !equal_marginals) {
    throw UsageError(name + " needs equal marginals (bivariate_joint, or bivariate_product with beta = beta2)");
  }
  if (statistic == Statistic::thm2_divergence && equal_marginals) {
    throw UsageError("thm2_divergence needs distinct marginals (bivariate_product with beta != beta2)");
  }
}

ProbVector population(const SimConfig& cfg) {
  const std::size_t m = cfg.m;
  switch (cfg.family) {
    case Family::power_law:
      return powerlaw_pmf(cfg.beta, m);
    case Family::uniform:
      return ProbVector::uniform(m);
    case Family::noise_and_signal: {
      std::vector<double> w(m, (1.0 - cfg.p0) / static_cast<double>(m - 1));
      w[0] = cfg.p0;
      return ProbVector::normalized(w);
    }
    case Family::mixture: {
      std::size_t noise_cats = 0;
      double noise_mass = 0.0;
      for (const auto& blk : cfg.noise_blocks) {
        noise_cats += blk.categories;
        noise_mass += blk.mass;
      }
      if (noise_cats >= m) throw UsageError("noise blocks leave no signal categories");
      const ProbVector signal = powerlaw_pmf(cfg.beta, m - noise_cats);
      std::vector<double> w;
      w.reserve(m);
      for (double v : signal) w.push_back(v * (1.0 - noise_mass));
      for (const auto& blk : cfg.noise_blocks) {
        w.insert(w.end(), blk.categories, blk.mass / static_cast<double>(blk.categories));
      }
      return ProbVector::normalized(w);
    }
    case Family::bivariate_product:
    case Family::bivariate_joint:
      break;
  }
  throw UsageError(std::string(to_string(cfg.family)) + " is a bivariate family");
}

std::pair<ProbVector, ProbVector> population_marginals(const SimConfig& cfg) {
  if (cfg.family == Family::bivariate_product) {
    return {powerlaw_pmf(cfg.beta, cfg.m), powerlaw_pmf(cfg.beta2, cfg.m)};
  }
  if (cfg.family == Family::bivariate_joint) {
    ProbVector p = powerlaw_pmf(cfg.beta, cfg.m);
    return {p, p};
  }
  throw UsageError(std::string(to_string(cfg.family)) + " is a univariate family");
}

JointDistribution population_joint(const SimConfig& cfg) {
  const auto [p, q] = population_marginals(cfg);
  if (cfg.family == Family::bivariate_product) return JointDistribution::product(p, q);
  return JointDistribution::correlated(p, cfg.rho);
}

CountVector sample_multinomial(const ProbVector& p, std::uint64_t n, RandomStream& stream) {
  if (n < 1) throw DomainError("sample size must be at least 1");
  return CountVector(multinomial_counts(p.values(), n, stream));
}

JointCountTable sample_joint(const JointDistribution& joint, std::uint64_t n, RandomStream& stream) {
  if (n < 1) throw DomainError("sample size must be at least 1");
  const std::size_t m = joint.m();
  const std::vector<std::uint64_t> counts = multinomial_counts(joint.cells(), n, stream);
  JointCountTable table(m);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > 0) table.add(k / m, k % m, counts[k]);
  }
  return table;
}

double ks_distance_normal(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("KS distance needs at least 2 samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double b = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / b - f, f - static_cast<double>(i) / b});
  }
  return std::min(d, 1.0);
}

std::vector<std::pair<double, double>> normal_qq_pairs(std::span<const double> samples) {
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double b = static_cast<double>(x.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.emplace_back(normal_quantile((static_cast<double>(i) + 0.5) / b), x[i]);
  }
  return out;
}

SimRun simulate_statistic(const SimConfig& cfg) {
  cfg.validate();
  const Alpha alpha(cfg.alpha);
  const double a = cfg.alpha;
  SimRun run;
  run.config_echo = cfg;

  switch (cfg.statistic) {
    case Statistic::thm1_entropy: {
      const ProbVector p = population(cfg);
      const double truth = renyi_entropy(p, alpha);
      const double unit = projection_w_moments(p, alpha).cv * a / (1.0 - a);
      run.samples = run_replicates(cfg, [&](RandomStream& s) {
        const CountVector c = draw_univariate(cfg, p, s);
        const double n = static_cast<double>(c.n());
        return (renyi_entropy(c.frequencies(), alpha) - truth) * std::sqrt(n) / unit;
      });
      break;
    }
    case Statistic::lemma2_pearson: {
      const ProbVector p = population(cfg);
      run.samples = run_replicates(cfg, [&](RandomStream& s) {
        return pearson_standardized(pearson_chi_square(draw_univariate(cfg, p, s), p), p.size());
      });
      break;
    }
    case Statistic::thm3_uniform_entropy: {
      const ProbVector p = population(cfg);
      if (cfg.n() <= cfg.m) {
        throw UndefinedStatisticError("normalized uniform entropy statistic is undefined for n <= m (n = " +
                                      std::to_string(cfg.n()) + ", m = " + std::to_string(cfg.m) + ")");
      }
      run.samples = run_replicates(
          cfg, [&](RandomStream& s) { return uniform_entropy_statistic(draw_univariate(cfg, p, s), alpha); });
      break;
    }
    case Statistic::thm2_divergence: {
      const auto [p, q] = population_marginals(cfg);
      const double truth = renyi_divergence(p, q, alpha);
      const double unit = projection_v_moments(population_joint(cfg), alpha).cv / (1.0 - a);
      run.samples = run_replicates(cfg, [&](RandomStream& s) {
        const auto [cx, cy] = draw_bivariate(cfg, p, q, s);
        const double n = static_cast<double>(cx.n());
        return (renyi_divergence(cx.frequencies(), cy.frequencies(), alpha) - truth) * std::sqrt(n) / unit;
      });
      break;
    }
    case Statistic::thm4_degenerate_divergence:
    case Statistic::lemma2_two_sample: {
      const auto [p, q] = population_marginals(cfg);
      const ChiSquareNullParams null = chi_square_null_params(population_joint(cfg));
      const double scale = std::sqrt(2.0 * null.gamma_sq);
      const bool entropy_form = cfg.statistic == Statistic::thm4_degenerate_divergence;
      run.samples = run_replicates(cfg, [&](RandomStream& s) {
        const auto [cx, cy] = draw_bivariate(cfg, p, q, s);
        const double n = static_cast<double>(cx.n());
        double raw = 0.0;
        if (entropy_form) {
          const double sum = cross_power_sum(cx.frequencies(), cy.frequencies(), alpha).value;
          raw = n * (sum - 1.0) / (a * (a - 1.0));
        } else {
          CompensatedSum x2;
          for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = (static_cast<double>(cx[i]) - static_cast<double>(cy[i])) / n;
            x2 += d * d / (2.0 * p[i]);
          }
          raw = n * x2.value();
        }
        return (raw - null.mu) / scale;
      });
      break;
    }
  }
  run.ks_distance = ks_distance_normal(run.samples);
  run.qq_pairs = normal_qq_pairs(run.samples);
  return run;
}

double coverage_experiment(const SimConfig& cfg, double level) {
  cfg.validate();
  if (!(level > 0.0 && level < 1.0)) throw UsageError("coverage level must lie in (0, 1)");
  const Alpha alpha(cfg.alpha);
  std::vector<double> hits;
  if (cfg.statistic == Statistic::thm1_entropy) {
    const ProbVector p = population(cfg);
    const double truth = renyi_entropy(p, alpha);
    hits = run_replicates(cfg, [&](RandomStream& s) {
      const CountVector c = draw_univariate(cfg, p, s);
      try {
        const EstimateWithCI ci = entropy_ci(c, alpha, level);
        return ci.lower <= truth && truth <= ci.upper ? 1.0 : 0.0;
      } catch (const DomainError&) {
        return 0.0;
      }
    });
  } else if (cfg.statistic == Statistic::thm2_divergence) {
    const auto [p, q] = population_marginals(cfg);
    const double truth = renyi_divergence(p, q, alpha);
    hits = run_replicates(cfg, [&](RandomStream& s) {
      const auto [cx, cy] = draw_bivariate(cfg, p, q, s);
      try {
        const EstimateWithCI ci = divergence_ci(cx, cy, alpha, level);
        return ci.lower <= truth && truth <= ci.upper ? 1.0 : 0.0;
      } catch (const DomainError&) {
        return 0.0;
      }
    });
  } else {
    throw UsageError("coverage_experiment needs thm1_entropy or thm2_divergence");
  }
  CompensatedSum total;
  for (double h : hits) total += h;
  return total.value() / static_cast<double>(hits.size());
}

BiasResult bias_experiment(const SimConfig& cfg) {
  cfg.validate();
  const Alpha alpha(cfg.alpha);
  std::vector<double> ratios;
  if (cfg.statistic == Statistic::thm1_entropy) {
    const ProbVector p = population(cfg);
    const double truth = power_sum(p, alpha);
    ratios = run_replicates(cfg, [&](RandomStream& s) {
      return power_sum(draw_univariate(cfg, p, s).frequencies(), alpha) / truth - 1.0;
    });
  } else if (cfg.statistic == Statistic::thm2_divergence) {
    const auto [p, q] = population_marginals(cfg);
    const double truth = cross_power_sum(p, q, alpha).value;
    ratios = run_replicates(cfg, [&](RandomStream& s) {
      const auto [cx, cy] = draw_bivariate(cfg, p, q, s);
      return cross_power_sum(cx.frequencies(), cy.frequencies(), alpha).value / truth - 1.0;
    });
  } else {
    throw UsageError("bias_experiment needs thm1_entropy or thm2_divergence");
  }
  const double b = static_cast<double>(ratios.size());
  CompensatedSum sum;
  for (double r : ratios) sum += r;
  const double mean = sum.value() / b;
  CompensatedSum ss;
  for (double r : ratios) ss += (r - mean) * (r - mean);
  BiasResult out;
  out.relative_bias = mean;
  out.mcse = ratios.size() > 1 ? std::sqrt(ss.value() / (b - 1.0) / b) : 0.0;
  return out;
}

}  // namespace renydiv
