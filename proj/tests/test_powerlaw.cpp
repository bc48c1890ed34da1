#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "renydiv/errors.hpp"
#include "renydiv/montecarlo.hpp"
#include "renydiv/powerlaw.hpp"

using namespace renydiv;

namespace {

double max_qq_deviation(const std::vector<std::pair<double, double>>& qq) {
  double d = 0.0;
  for (const auto& [a, b] : qq) d = std::max(d, std::abs(a - b));
  return d;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("power-law pmf") {
  const ProbVector p = powerlaw_pmf(1.0, 2);
  CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(PowerLawModel(1.0, 2).h_norm == doctest::Approx(1.5));

  const ProbVector flat = powerlaw_pmf(1e-12, 5);
  for (double v : flat) CHECK(std::abs(v - 0.2) < 1e-10);

  const double m = 1e4;
  CHECK(std::abs(PowerLawModel(0.5, 10000).h_norm / (2.0 * std::sqrt(m)) - 1.0) < 0.02);

  CHECK_THROWS_AS(powerlaw_pmf(0.0, 5), DomainError);
  CHECK_THROWS_AS(powerlaw_pmf(-1.0, 5), DomainError);
  CHECK_THROWS_AS(powerlaw_pmf(1.0, 0), DomainError);
  for (double beta : {0.1, 0.87, 2.5}) {
    CHECK_NOTHROW(ProbVector(powerlaw_pmf(beta, 3000).values()));
  }
}

TEST_CASE("rank-frequency fit") {
  std::vector<std::uint64_t> exact(165);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    exact[i] = static_cast<std::uint64_t>(std::llround(1e15 * std::pow(static_cast<double>(i + 1), -0.87)));
  }
  std::reverse(exact.begin(), exact.end());
  const FitResult f = fit_powerlaw_ls(CountVector(exact));
  CHECK(std::abs(f.beta_hat - 0.87) < 1e-9);
  CHECK(f.std_error >= 0.0);
  CHECK(f.ranks_used == 165);

  CHECK(fit_powerlaw_ls(CountVector(std::vector<std::uint64_t>(40, 25))).beta_hat == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_powerlaw_ls(CountVector({5, 0, 3})), DomainError);
}

TEST_CASE("fit is invariant to scaling the counts") {
  RandomStream s(1);
  const CountVector c = sample_multinomial(powerlaw_pmf(0.9, 120), 20000, s);
  std::vector<std::uint64_t> big(c.counts());
  for (auto& v : big) v *= 37;
  CHECK(std::abs(fit_powerlaw_ls(CountVector(big)).beta_hat - fit_powerlaw_ls(c).beta_hat) < 1e-12);
}

TEST_CASE("fit on a sampled power law") {
  RandomStream s(2);
  const FitResult f = fit_powerlaw_ls(sample_multinomial(powerlaw_pmf(0.87, 165), 39084, s));
  CHECK(std::abs(f.beta_hat - 0.87) < 0.1);
  CHECK(f.std_error > 0.0);
  CHECK(f.std_error < 0.1);
}

TEST_CASE("min-mass ratio approaches the m/n rate for beta < 1") {
  const double beta = 0.5;
  for (std::size_t m : {1000u, 10000u, 100000u}) {
    const ProbVector p = powerlaw_pmf(beta, m);
    const double n = 1e9;
    const double ratio = (1.0 / (n * p.min_positive())) / (static_cast<double>(m) / ((1.0 - beta) * n));
    CHECK(std::abs(ratio - 1.0) < 0.05);
  }
}

TEST_CASE("power sum growth for alpha > 1/2") {
  const double beta = 0.5;
  const double a = 0.7;
  const std::size_t m = 100000;
  const double s = power_sum(powerlaw_pmf(beta, m), Alpha(a));
  const double approx = std::pow(1.0 - beta, a) * std::pow(static_cast<double>(m), 1.0 - a) / (1.0 - a * beta);
  CHECK(std::abs(s / approx - 1.0) < 0.05);
}

TEST_CASE("QQ pairs against the generating and a mismatched model") {
  const PowerLawModel truth(0.87, 165);
  const PowerLawModel off(1.37, 165);
  std::vector<double> matched, mismatched;
  for (std::uint64_t r = 0; r < 11; ++r) {
    RandomStream s = RandomStream::child(55, r);
    const CountVector c = sample_multinomial(truth.pmf(), 39084, s);
    matched.push_back(max_qq_deviation(powerlaw_qq(c.counts(), truth)));
    mismatched.push_back(max_qq_deviation(powerlaw_qq(c.counts(), off)));
  }
  CHECK(median(mismatched) > median(matched));

  RandomStream s(3);
  const CountVector c = sample_multinomial(truth.pmf(), 39084, s);
  const auto qq = powerlaw_qq(c.counts(), truth);
  CHECK(qq.size() == c.observed_categories());
  for (const auto& [model_q, sample_q] : qq) CHECK(std::abs(model_q - sample_q) <= 0.1 * 165);

  const std::vector<std::uint64_t> none(10, 0);
  CHECK(powerlaw_qq(none, truth).empty());
}
