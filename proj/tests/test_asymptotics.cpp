#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "renydiv/asymptotics.hpp"
#include "renydiv/errors.hpp"
#include "renydiv/montecarlo.hpp"
#include "renydiv/powerlaw.hpp"
#include "renydiv/reference_distributions.hpp"

using namespace renydiv;

namespace {

constexpr double kZ975 = 1.959963984540054;

CountVector counts(std::vector<std::uint64_t> v) { return CountVector(std::move(v)); }

std::vector<std::uint64_t> scaled(const CountVector& c, std::uint64_t k) {
  std::vector<std::uint64_t> out(c.counts());
  for (auto& v : out) v *= k;
  return out;
}

}  // namespace

TEST_CASE("count containers") {
  CHECK_THROWS_AS(counts({0, 0}), DomainError);
  const CountVector c = counts({3, 0, 7});
  CHECK(c.n() == 10);
  CHECK(c.observed_categories() == 2);
  CHECK(c.frequencies()[2] == doctest::Approx(0.7));

  JointCountTable t(3);
  t.add(0, 1, 4);
  t.add(0, 1, 1);
  t.add(2, 2, 5);
  CHECK(t.n() == 10);
  CHECK(t.at(0, 1) == 5);
  CHECK(t.at(1, 1) == 0);
  CHECK(t.row_counts().counts() == std::vector<std::uint64_t>{5, 0, 5});
  CHECK(t.col_counts().counts() == std::vector<std::uint64_t>{0, 5, 5});
  CHECK_THROWS_AS(t.add(3, 0, 1), ShapeError);
}

TEST_CASE("Pearson and two-sample chi-square by hand") {
  CHECK(pearson_chi_square(counts({3, 3, 4}), ProbVector::uniform(3)) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(pearson_chi_square(counts({25, 25, 50}), ProbVector({0.25, 0.25, 0.5})) == 0.0);
  CHECK_THROWS_AS(pearson_chi_square(counts({1, 1}), ProbVector({1.0, 0.0})), DomainError);
  CHECK_THROWS_AS(pearson_chi_square(counts({1, 1}), ProbVector::uniform(3)), ShapeError);

  JointCountTable t(2);
  t.add(0, 0, 5);
  t.add(0, 1, 3);
  t.add(1, 1, 2);
  CHECK(two_sample_chi_square(t, ProbVector({0.5, 0.5})) == doctest::Approx(1.8).epsilon(1e-14));

  JointCountTable same(2);
  same.add(0, 0, 4);
  same.add(1, 1, 6);
  CHECK(two_sample_chi_square(same, ProbVector({0.5, 0.5})) == 0.0);
}

TEST_CASE("chi-square null parameters") {
  const ProbVector p5 = ProbVector::normalized(std::vector<double>{1, 2, 3, 4, 5});
  const auto prod = chi_square_null_params(JointDistribution::product(p5, p5));
  CHECK(prod.mu == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(prod.gamma_sq == doctest::Approx(4.0).epsilon(1e-14));

  const auto diag = chi_square_null_params(JointDistribution::correlated(p5, 1.0));
  CHECK(diag.mu == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(diag.gamma_sq == doctest::Approx(0.0).epsilon(1e-14));

  // mu = 2 (1 - 0.3/0.5); gamma^2 = 2 (0.2/0.5)^2 + 2 (0.2 + 0.2)^2 / (4 * 0.25).
  const auto two = chi_square_null_params(JointDistribution(2, {0.3, 0.2, 0.2, 0.3}));
  CHECK(two.mu == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(two.gamma_sq == doctest::Approx(0.64).epsilon(1e-14));

  CHECK_THROWS_AS(chi_square_null_params(JointDistribution(2, {0.3, 0.3, 0.1, 0.3})), DomainError);
}

TEST_CASE("null scale stays within the boundedness envelope") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 5 + rng() % 40;
    const ProbVector p = ProbVector::normalized(oracle::random_distribution(rng, m));
    const double rho = 0.2 * u(rng);
    const JointDistribution j = JointDistribution::correlated(p, rho);
    double bound = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) bound = std::max(bound, j(i, k) / (p[i] * p[k]));
    }
    const double g = chi_square_null_params(j).gamma_sq;
    const double dm = static_cast<double>(m);
    CHECK(g >= dm - 2.0 * bound - 1e-9);
    CHECK(g <= dm + bound * bound + 1e-9);
  }
}

TEST_CASE("generalized binomial coefficient") {
  CHECK(generalized_binomial(0.5, 2) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(generalized_binomial(5.0, 2) == doctest::Approx(10.0));
  CHECK(generalized_binomial(0.3, 0) == 1.0);
  CHECK(1.0 + generalized_binomial(0.5, 2) * 100.0 / 1e5 == doctest::Approx(0.999875).epsilon(1e-15));
}

TEST_CASE("entropy interval against a direct computation") {
  const CountVector c = counts({50, 30, 20});
  const auto ci = entropy_ci(c, Alpha(0.5), 0.95);
  const auto w = oracle::w_law({0.5, 0.3, 0.2}, 0.5L);
  const double cv = static_cast<double>(std::sqrt(w.var) / w.mean);
  const double se = cv * 0.5 / (0.5 * std::sqrt(100.0));
  CHECK(ci.estimate == doctest::Approx(1.0636585111251116).epsilon(1e-13));
  CHECK(ci.std_error == doctest::Approx(se).epsilon(1e-12));
  CHECK(ci.lower == doctest::Approx(ci.estimate - kZ975 * se).epsilon(1e-12));
  CHECK(ci.upper == doctest::Approx(ci.estimate + kZ975 * se).epsilon(1e-12));
  CHECK(ci.lower <= ci.estimate);
  CHECK(ci.estimate <= ci.upper);
  CHECK(ci.method == CiMethod::thm1);
  CHECK(ci.m == 3);
  CHECK(ci.n == 100);
  REQUIRE(ci.diagnostics.has_value());

  const auto hill = hill_ci(c, Alpha(0.5), 0.95);
  CHECK(hill.estimate == doctest::Approx(std::exp(ci.estimate)));
  CHECK(hill.lower == doctest::Approx(std::exp(ci.lower)));
  CHECK(hill.upper == doctest::Approx(std::exp(ci.upper)));

  const auto wider = entropy_ci(counts(scaled(c, 4)), Alpha(0.5), 0.95);
  CHECK((wider.upper - wider.lower) == doctest::Approx((ci.upper - ci.lower) / 2.0).epsilon(1e-12));
}

TEST_CASE("entropy interval refuses degenerate projections") {
  CHECK_THROWS_AS(entropy_ci(counts({0, 12, 0}), Alpha(0.5), 0.95), DegenerateError);
  CHECK_THROWS_AS(entropy_ci(counts({7, 7, 7, 7}), Alpha(0.5), 0.95), DegenerateError);
  CHECK_THROWS_AS(entropy_ci(counts({1, 0}), Alpha(0.5), 0.95), DomainError);
  CHECK_THROWS_AS(entropy_ci(counts({4, 5}), Alpha(0.5), 1.5), DomainError);
}

TEST_CASE("independent divergence interval against a direct computation") {
  const CountVector cx = counts({50, 30, 20});
  const CountVector cy = counts({20, 30, 50});
  const double a = 0.4;
  const auto ci = divergence_ci(cx, cy, Alpha(a), 0.9);
  const std::vector<double> p{0.5, 0.3, 0.2}, q{0.2, 0.3, 0.5};
  std::vector<std::pair<oracle::Real, oracle::Real>> la, lb;
  for (int i = 0; i < 3; ++i) {
    la.emplace_back(a * std::pow(static_cast<oracle::Real>(q[i] / p[i]), 1 - a), p[i]);
    lb.emplace_back((1 - a) * std::pow(static_cast<oracle::Real>(p[i] / q[i]), a), q[i]);
  }
  const double s = static_cast<double>(oracle::cross_power_sum(p, q, a));
  const double var = static_cast<double>(oracle::enumerate(la).var + oracle::enumerate(lb).var) / 100.0;
  const double se = std::sqrt(var) / (s * (1.0 - a));
  CHECK(ci.estimate == doctest::Approx(static_cast<double>(oracle::divergence(p, q, a))).epsilon(1e-13));
  CHECK(ci.std_error == doctest::Approx(se).epsilon(1e-12));
  CHECK(ci.upper - ci.estimate == doctest::Approx(normal_quantile(0.95) * se).epsilon(1e-12));
  CHECK(ci.method == CiMethod::thm2);

  CHECK_THROWS_AS(divergence_ci(cx, cx, Alpha(0.5), 0.95), DegenerateError);
  CHECK_THROWS_AS(divergence_ci(cx, counts({1, 2}), Alpha(0.5), 0.95), ShapeError);
}

TEST_CASE("paired divergence interval uses the empirical joint") {
  JointCountTable t(3);
  const std::vector<std::uint64_t> cells{20, 10, 5, 5, 15, 10, 5, 5, 25};
  std::vector<double> joint;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    t.add(k / 3, k % 3, cells[k]);
    joint.push_back(static_cast<double>(cells[k]) / 100.0);
  }
  const double a = 0.5;
  const auto ci = divergence_ci(t, Alpha(a), 0.95);
  const auto v = oracle::v_law(joint, 3, a);
  const double se = static_cast<double>(std::sqrt(v.var) / (10.0L * v.mean * (1 - a)));
  CHECK(ci.std_error == doctest::Approx(se).epsilon(1e-12));
  CHECK(ci.n == 100);
}

TEST_CASE("uniformity tests") {
  CHECK_THROWS_AS(uniform_entropy_statistic(counts({2, 1, 1, 0}), Alpha(0.5)), UndefinedStatisticError);
  CHECK_THROWS_AS(uniformity_test(counts({2, 1, 1, 0}), Alpha(0.5)), UndefinedStatisticError);
  CHECK_NOTHROW(uniformity_test(counts({2, 1, 1, 0}), Alpha(0.5), UniformityMethod::pearson));

  const CountVector flat = counts(std::vector<std::uint64_t>(50, 40));
  const auto t = uniformity_test(flat, Alpha(0.5));
  CHECK(t.method == TestMethod::thm3);
  CHECK(t.sidedness == Sidedness::two_sided);
  CHECK(t.statistic == doctest::Approx((t.raw_statistic - t.null_mean) / t.null_sd).epsilon(1e-12));
  CHECK(t.p_value == doctest::Approx(2.0 * normal_sf(std::abs(t.statistic))));

  RandomStream s(99);
  const CountVector skew = sample_multinomial(powerlaw_pmf(1.0, 100), 100000, s);
  CHECK(uniformity_test(skew, Alpha(0.5)).p_value < 0.001);
  CHECK(uniformity_test(skew, Alpha(0.5), UniformityMethod::pearson).p_value < 0.001);
}

TEST_CASE("equality test, independent mode") {
  const CountVector c = counts({40, 30, 20, 10, 5});
  const auto same = equality_test(c, c, Alpha(0.5));
  CHECK(same.raw_statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(same.statistic == doctest::Approx(-std::sqrt(4.0 / 2.0)).epsilon(1e-12));
  CHECK(same.p_value > 0.9);
  CHECK(same.sidedness == Sidedness::upper);
  CHECK(same.null_mean == 4.0);

  CHECK_THROWS_AS(equality_test(counts({5, 0}), counts({3, 0}), Alpha(0.5)), DomainError);

  RandomStream s(7);
  const auto x = sample_multinomial(powerlaw_pmf(0.87, 165), 39084, s);
  const auto y = sample_multinomial(powerlaw_pmf(0.97, 165), 39084, s);
  CHECK(equality_test(x, y, Alpha(0.5)).p_value < 1e-4);
}

TEST_CASE("equality test, paired mode") {
  RandomStream s(31);
  const ProbVector p = powerlaw_pmf(0.8, 40);
  const JointCountTable null_table = sample_joint(JointDistribution::correlated(p, 0.3), 20000, s);
  const auto t = equality_test(null_table, Alpha(0.5));
  CHECK(t.method == TestMethod::thm4);
  CHECK(t.null_mean > 0.0);
  CHECK(t.null_mean < 39.0);
  CHECK(t.p_value > 1e-3);

  const JointCountTable alt = sample_joint(JointDistribution::product(p, powerlaw_pmf(1.2, 40)), 20000, s);
  CHECK(equality_test(alt, Alpha(0.5)).p_value < 1e-6);
}

TEST_CASE("equality statistic is close to normal under the null") {
  const ProbVector p = powerlaw_pmf(1.0, 100);
  std::vector<double> z;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    RandomStream s = RandomStream::child(4242, r);
    z.push_back(equality_test(sample_multinomial(p, 100000, s), sample_multinomial(p, 100000, s), Alpha(0.5)).statistic);
  }
  CHECK(ks_distance_normal(z) < 0.05);
}

TEST_CASE("binomial thinning") {
  RandomStream s(5);
  const CountVector c = counts({4, 3, 3});
  CHECK(binomial_thinning(c, 1.0 - 1e-12, s).counts() == c.counts());
  CHECK_THROWS_AS(binomial_thinning(c, 1.0, s), DomainError);
  CHECK_THROWS_AS(binomial_thinning(c, 0.0, s), DomainError);

  RandomStream a(123), b(123);
  const auto ta = binomial_thinning(counts({10, 0}), 0.5, a);
  const auto tb = binomial_thinning(counts({10, 0}), 0.5, b);
  CHECK(ta.counts() == tb.counts());
  CHECK(ta[1] == 0);

  RandomStream m(77);
  double total = 0.0;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) total += static_cast<double>(binomial_thinning(counts({600, 400}), 0.7, m).n());
  // bin(1000, 0.7): mean 700, sd 14.5; the mean of 4000 draws has sd 0.23.
  CHECK(std::abs(total / reps - 700.0) < 1.0);
}
