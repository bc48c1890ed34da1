// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "renydiv/asymptotics.hpp"
#include "renydiv/cli_io.hpp"
#include "renydiv/core_measures.hpp"
#include "renydiv/errors.hpp"
#include "renydiv/montecarlo.hpp"
#include "renydiv/pipeline.hpp"
#include "renydiv/powerlaw.hpp"
#include "renydiv/projections.hpp"

using namespace renydiv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SimConfig power_law_design(double eps) {
  SimConfig c;
  c.family = Family::power_law;
  c.beta = 1.0;
  c.alpha = 0.5;
  c.m = 300;
  c.B = 2000;
  c.epsilon = eps;
  c.statistic = Statistic::thm1_entropy;
  return c;
}

Outcome criterion1() {
  constexpr double kPassBelow = 0.05;
  constexpr double kFailAbove = 0.25;
  constexpr double kWallSeconds = 600.0;
  const auto t0 = std::chrono::steady_clock::now();
  const double lo = simulate_statistic(power_law_design(-0.5)).ks_distance;
  const double mid = simulate_statistic(power_law_design(0.5)).ks_distance;
  const double hi = simulate_statistic(power_law_design(1.5)).ks_distance;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = hi < kPassBelow && lo > kFailAbove && lo > mid && mid > hi && secs < kWallSeconds;
  return {ok, fmt("KS(-0.5)=%.4f KS(0.5)=%.4f KS(1.5)=%.4f; need KS(1.5)<%.2f, KS(-0.5)>%.2f, decreasing; %.1fs",
                  lo, mid, hi, kPassBelow, kFailAbove, secs)};
}

Outcome criterion2() {
  constexpr double kPassBelow = 0.05;
  SimConfig c;
  c.family = Family::uniform;
  c.m = 100;
  c.B = 2000;
  c.alpha = 0.5;
  auto ks = [&](Statistic st, double eps) {
    c.statistic = st;
    c.epsilon = eps;
    return simulate_statistic(c).ks_distance;
  };
  const double p05 = ks(Statistic::lemma2_pearson, 0.5);
  const double p15 = ks(Statistic::lemma2_pearson, 1.5);
  const double e05 = ks(Statistic::thm3_uniform_entropy, 0.5);
  const double e15 = ks(Statistic::thm3_uniform_entropy, 1.5);
  bool undefined = false;
  try {
    ks(Statistic::thm3_uniform_entropy, -0.5);
  } catch (const UndefinedStatisticError&) {
    undefined = true;
  }
  const bool ok = p05 < kPassBelow && p15 < kPassBelow && e05 >= kPassBelow && e15 < kPassBelow && undefined;
  return {ok, fmt("pearson KS(0.5)=%.4f KS(1.5)=%.4f; entropy KS(0.5)=%.4f KS(1.5)=%.4f; undefined at -0.5: %s",
                  p05, p15, e05, e15, undefined ? "yes" : "no")};
}

Outcome criterion3() {
  constexpr std::size_t kB = 5000;
  constexpr std::size_t kM = 20;
  constexpr std::uint64_t kN = 2000;
  constexpr double kSe = 3.0;
  const ProbVector p = powerlaw_pmf(1.0, kM);
  std::vector<double> x(kB);
  for (std::size_t r = 0; r < kB; ++r) {
    RandomStream s = RandomStream::child(kDefaultMasterSeed, r);
    x[r] = pearson_chi_square(sample_multinomial(p, kN, s), p);
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= kB;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double mcse = std::sqrt(var / (kB - 1) / kB);
  const double target = static_cast<double>(kM - 1);
  return {std::abs(mean - target) <= kSe * mcse,
          fmt("mean=%.4f target=%.0f mcse=%.4f (|diff|/mcse=%.2f, need <= %.0f)", mean, target, mcse,
              std::abs(mean - target) / mcse, kSe)};
}

Outcome criterion4() {
  constexpr double kTol = 1e-12;
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int r = 0; r < 100; ++r) {
    const std::size_t m = 2 + rng() % 80;
    const ProbVector p = ProbVector::normalized(oracle::random_distribution(rng, m));
    const ChiSquareNullParams np = chi_square_null_params(JointDistribution::product(p, p));
    const double target = static_cast<double>(m - 1);
    worst = std::max({worst, std::abs(np.mu - target), std::abs(np.gamma_sq - target)});
  }
  return {worst <= kTol, fmt("max |(mu, gamma^2) - (m-1, m-1)| = %.3g over 100 joints (tol %.0e)", worst, kTol)};
}

Outcome criterion5() {
  constexpr double kTol = 1e-12;
  std::mt19937_64 rng(505);
  double worst = 0.0;
  for (int r = 0; r < 100; ++r) {
    const std::size_t m = 2 + rng() % 80;
    const auto pv = oracle::random_distribution(rng, m);
    const auto qv = oracle::random_distribution(rng, m);
    const ProbVector p = ProbVector::normalized(pv);
    const ProbVector q = ProbVector::normalized(qv);
    long double bc = 0.0L;
    for (std::size_t i = 0; i < m; ++i) bc += std::sqrt(static_cast<long double>(p[i]) * q[i]);
    const double target = static_cast<double>(0.5L - bc * bc / 2.0L);
    const double got = projection_v_moments(JointDistribution::product(p, q), Alpha(0.5)).variance;
    worst = std::max(worst, std::abs(got - target));
  }
  return {worst <= kTol, fmt("max |Var V - (1/2 - BC^2/2)| = %.3g over 100 joints (tol %.0e)", worst, kTol)};
}

Outcome criterion6() {
  constexpr double kTol = 1e-12;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  int cases = 0;
  while (cases < 1000) {
    const std::size_t m = 2 + rng() % 60;
    const ProbVector p = ProbVector::normalized(oracle::random_distribution(rng, m));
    const ProbVector q = ProbVector::normalized(oracle::random_distribution(rng, m));
    double a = 0.01 + 0.98 * u(rng);
    double b = 0.01 + 0.98 * u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    ++cases;
    const Alpha lo(a), hi(b);
    const bool bad = renyi_entropy(p, lo) < renyi_entropy(p, hi) - kTol ||
                     renyi_divergence(p, q, lo) > renyi_divergence(p, q, hi) + kTol ||
                     hill_number(p, lo) < hill_number(p, hi) * (1.0 - kTol) ||
                     std::abs(renyi_entropy(p, lo) - (std::log(static_cast<double>(m)) -
                                                      renyi_divergence(p, ProbVector::uniform(m), lo))) > kTol ||
                     std::abs(cross_power_sum(p, q, Alpha(0.5)).value - cross_power_sum(q, p, Alpha(0.5)).value) >
                         kTol ||
                     renyi_divergence(p, q, lo) < -kTol;
    if (bad) ++violations;
  }
  return {violations == 0, fmt("%d violations in %d cases (slack %.0e)", violations, cases, kTol)};
}

Outcome criterion7() {
  constexpr double kLow = 0.93;
  constexpr double kHigh = 0.97;
  SimConfig c;
  c.family = Family::power_law;
  c.beta = 0.87;
  c.m = 165;
  c.n_override = 39084;
  c.B = 1000;
  c.alpha = 0.5;
  c.statistic = Statistic::thm1_entropy;
  const double h = coverage_experiment(c, 0.95);
  c.family = Family::bivariate_product;
  c.beta2 = 0.97;
  c.statistic = Statistic::thm2_divergence;
  const double d = coverage_experiment(c, 0.95);
  const bool ok = h >= kLow && h <= kHigh && d >= kLow && d <= kHigh;
  return {ok, fmt("entropy coverage=%.3f divergence coverage=%.3f; need [%.2f, %.2f]", h, d, kLow, kHigh)};
}

Outcome criterion8() {
  constexpr std::size_t kPowerReps = 200;
  constexpr double kPowerP = 1e-4;
  constexpr double kPowerRate = 0.95;
  constexpr std::size_t kSizeReps = 2000;
  constexpr double kSizeLevel = 0.05;
  constexpr double kSizeLow = 0.03;
  constexpr double kSizeHigh = 0.07;
  const Alpha a(0.5);
  const ProbVector p = powerlaw_pmf(0.87, 165);
  const ProbVector q = powerlaw_pmf(0.97, 165);
  std::size_t strong = 0;
  for (std::size_t r = 0; r < kPowerReps; ++r) {
    RandomStream s = RandomStream::child(kDefaultMasterSeed + 8, r);
    const CountVector x = sample_multinomial(p, 39084, s);
    const CountVector y = sample_multinomial(q, 39084, s);
    if (equality_test(x, y, a).p_value < kPowerP) ++strong;
  }
  std::size_t rejected = 0;
  for (std::size_t r = 0; r < kSizeReps; ++r) {
    RandomStream s = RandomStream::child(kDefaultMasterSeed + 80, r);
    const CountVector x = sample_multinomial(p, 39084, s);
    const CountVector y = sample_multinomial(p, 39084, s);
    if (equality_test(x, y, a).p_value < kSizeLevel) ++rejected;
  }
  const double power = static_cast<double>(strong) / kPowerReps;
  const double size = static_cast<double>(rejected) / kSizeReps;
  const bool ok = power >= kPowerRate && size >= kSizeLow && size <= kSizeHigh;
  return {ok, fmt("P(p<1e-4 | 0.87 vs 0.97)=%.3f (need >= %.2f); size at 0.05=%.4f (need [%.2f, %.2f])", power,
                  kPowerRate, size, kSizeLow, kSizeHigh)};
}

Outcome criterion9() {
  constexpr double kPassBelow = 0.05;
  SimConfig c = power_law_design(1.5);
  c.thinning_tau = 0.7;
  const double ks = simulate_statistic(c).ks_distance;
  return {ks < kPassBelow, fmt("KS(1.5, tau=0.7)=%.4f; need < %.2f", ks, kPassBelow)};
}

Outcome criterion10() {
  constexpr std::uint64_t kCutoff = 17;
  constexpr double kNoiseFraction = 0.46;
  constexpr double kFractionTol = 0.05;
  constexpr double kRate = 0.90;
  constexpr std::size_t kReps = 100;
  constexpr std::size_t kSignal = 165;
  SimConfig cfg;
  cfg.family = Family::mixture;
  cfg.beta = 0.87;
  cfg.noise_blocks = {{1000, 0.0386}, {2440, 0.4214}};
  cfg.m = kSignal + 1000 + 2440;
  const ProbVector p = population(cfg);
  std::size_t both = 0, exact = 0, fraction = 0, realized = 0;
  for (std::size_t r = 0; r < kReps; ++r) {
    RandomStream s = RandomStream::child(kDefaultMasterSeed + 10, r);
    const CountVector c = sample_multinomial(p, 39084, s);
    const MixtureDecomposition d = filter_noise(c);
    std::uint64_t noise_max = 0;
    for (std::size_t i = kSignal; i < c.size(); ++i) noise_max = std::max(noise_max, c[i]);
    const bool hit = d.cutoff_k_m == kCutoff;
    const bool frac = std::abs(d.noise_fraction - kNoiseFraction) <= kFractionTol;
    exact += hit;
    fraction += frac;
    both += hit && frac;
    realized += d.cutoff_k_m == noise_max;
  }
  const double rate = static_cast<double>(both) / kReps;
  return {rate >= kRate,
          fmt("k_m=17 and |noise_fraction-0.46|<=0.05 in %zu/%zu (need >= %.0f%%); k_m=17: %zu, fraction: %zu, "
              "k_m=realized noise max: %zu",
              both, kReps, 100 * kRate, exact, fraction, realized)};
}

Outcome criterion11() {
  constexpr double kSe = 3.0;
  constexpr double kLargeTol = 0.01;
  bool ok = true;
  std::string detail;
  auto run = [&](SimConfig c, const char* name) {
    const BiasResult b = bias_experiment(c);
    const bool dir = b.relative_bias <= kSe * b.mcse;
    ok = ok && dir;
    detail += fmt("%s %+.4f(%.4f)%s; ", name, b.relative_bias, b.mcse, dir ? "" : " WRONG SIGN");
    return b;
  };
  SimConfig c;
  c.family = Family::power_law;
  c.beta = 1.0;
  c.m = 100;
  c.B = 1000;
  c.statistic = Statistic::thm1_entropy;
  for (std::uint64_t n : {10, 100, 1000, 10000}) {
    c.n_override = n;
    run(c, fmt("pl1 n=%llu", static_cast<unsigned long long>(n)).c_str());
  }
  c.n_override = 100000;
  const BiasResult large = run(c, "pl1 n=1e5");
  const bool small = std::abs(large.relative_bias) < kLargeTol;
  ok = ok && small;
  c.family = Family::uniform;
  c.n_override = 500;
  run(c, "uniform n=500");
  c.family = Family::bivariate_product;
  c.beta = 0.87;
  c.beta2 = 0.97;
  c.m = 165;
  c.n_override = 39084;
  c.statistic = Statistic::thm2_divergence;
  run(c, "pair n=39084");
  c.n_override = 500;
  run(c, "pair n=500");
  return {ok, detail + fmt("|bias| at n=1e5 %s %.2f", small ? "<" : ">=", kLargeTol)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome criterion12() {
  const fs::path dir = fs::temp_directory_path() / ("renydiv_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path cfg = dir / "design.cfg";
  std::ofstream(cfg) << format_sim_config(power_law_design(0.5));
  auto run = [&](int workers, const fs::path& out) {
    const std::string cmd = std::string("'") + RENYDIV_CLI_PATH + "' simulate --config '" + cfg.string() +
                            "' --seed 12 --workers " + std::to_string(workers) + " --output '" + out.string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  const bool ran = run(1, dir / "a.csv") && run(4, dir / "b.csv");
  const std::string a = slurp(dir / "a.csv");
  const std::string b = slurp(dir / "b.csv");
  fs::remove_all(dir);
  const bool ok = ran && !a.empty() && a == b;
  return {ok, fmt("workers=1 vs workers=4: %zu vs %zu bytes, %s", a.size(), b.size(),
                  ok ? "identical" : "different or failed")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1  entropy statistic normality by sample-size regime", criterion1},
      {"2  uniform design: Pearson vs entropy statistic", criterion2},
      {"3  Pearson statistic mean", criterion3},
      {"4  two-sample null parameters on product joints", criterion4},
      {"5  V variance at alpha=1/2 with independent marginals", criterion5},
      {"6  order monotonicity and identities", criterion6},
      {"7  interval coverage at 95%", criterion7},
      {"8  equality test power and size", criterion8},
      {"9  normality under binomial thinning", criterion9},
      {"10 noise filter recovery", criterion10},
      {"11 plug-in power-sum bias direction", criterion11},
      {"12 simulate output determinism across workers", criterion12},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
