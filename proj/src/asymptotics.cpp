#include "renydiv/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "renydiv/errors.hpp"
#include "renydiv/reference_distributions.hpp"

namespace renydiv {

namespace {

// Coefficient of variation below which a projection is treated as degenerate.
constexpr double kDegenerateCv = 1e-12;

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
}

EstimateWithCI make_interval(double estimate, double se, double level, std::uint64_t n, std::size_t m,
                             CiMethod method) {
  const double z = two_sided_critical(level);
  EstimateWithCI r;
  r.estimate = estimate;
  r.level = level;
  r.lower = estimate - z * se;
  r.upper = estimate + z * se;
  r.std_error = se;
  r.n = n;
  r.m = m;
  r.method = method;
  return r;
}

double pow_or_zero(double x, double e) { return x > 0.0 ? std::pow(x, e) : 0.0; }

}  // namespace

CountVector::CountVector(std::vector<std::uint64_t> counts) : counts_(std::move(counts)), n_(0) {
  for (auto c : counts_) n_ += c;
  if (n_ == 0) throw DomainError("count vector must have a positive total");
}

std::size_t CountVector::observed_categories() const noexcept {
  return static_cast<std::size_t>(std::count_if(counts_.begin(), counts_.end(), [](auto c) { return c > 0; }));
}

JointCountTable::JointCountTable(std::size_t m) : m_(m) {
  if (m == 0) throw DomainError("joint count table needs m >= 1");
}

void JointCountTable::add(std::size_t row, std::size_t col, std::uint64_t count) {
  if (row >= m_ || col >= m_) throw ShapeError("joint cell index outside the m x m table");
  if (count == 0) return;
  cells_[{row, col}] += count;
  n_ += count;
}

std::uint64_t JointCountTable::at(std::size_t row, std::size_t col) const {
  auto it = cells_.find({row, col});
  return it == cells_.end() ? 0 : it->second;
}

CountVector JointCountTable::row_counts() const {
  std::vector<std::uint64_t> out(m_, 0);
  for (const auto& [key, c] : cells_) out[key.first] += c;
  return CountVector(std::move(out));
}

CountVector JointCountTable::col_counts() const {
  std::vector<std::uint64_t> out(m_, 0);
  for (const auto& [key, c] : cells_) out[key.second] += c;
  return CountVector(std::move(out));
}

std::string_view to_string(CiMethod m) noexcept {
  switch (m) {
    case CiMethod::thm1: return "thm1";
    case CiMethod::thm2: return "thm2";
    case CiMethod::thm3: return "thm3";
    case CiMethod::thm4: return "thm4";
  }
  return "thm1";
}

std::string_view to_string(TestMethod m) noexcept {
  switch (m) {
    case TestMethod::lemma2i: return "lemma2i";
    case TestMethod::lemma2ii: return "lemma2ii";
    case TestMethod::thm3: return "thm3";
    case TestMethod::thm4: return "thm4";
    case TestMethod::chi2_homogeneity: return "chi2_homogeneity";
  }
  return "lemma2i";
}

std::string_view to_string(Sidedness s) noexcept {
  return s == Sidedness::upper ? "upper" : "two_sided";
}

double pearson_chi_square(const CountVector& c, const ProbVector& p) {
  if (c.size() != p.size()) throw ShapeError("count vector and distribution differ in size");
  const double n = static_cast<double>(c.n());
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) throw DomainError("Pearson statistic needs p_i > 0 (category " + std::to_string(i) + ")");
    const double d = static_cast<double>(c[i]) / n - p[i];
    s += d * d / p[i];
  }
  return n * s.value();
}

double two_sample_chi_square(const JointCountTable& joint, const ProbVector& p) {
  if (joint.m() != p.size()) throw ShapeError("joint table and distribution differ in size");
  const CountVector rows = joint.row_counts();
  const CountVector cols = joint.col_counts();
  const double n = static_cast<double>(joint.n());
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) throw DomainError("two-sample statistic needs p_i > 0 (category " + std::to_string(i) + ")");
    const double d = (static_cast<double>(rows[i]) - static_cast<double>(cols[i])) / n;
    s += d * d / (2.0 * p[i]);
  }
  return n * s.value();
}

ChiSquareNullParams chi_square_null_params(const JointDistribution& joint) {
  const std::size_t m = joint.m();
  const ProbVector& rows = joint.row_marginal();
  const ProbVector& cols = joint.col_marginal();
  std::vector<double> p(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(rows[i] - cols[i]) > kEqualMarginalTolerance) {
      throw DomainError("chi-square null parameters need equal marginals; category " + std::to_string(i) +
                        " differs");
    }
    p[i] = 0.5 * (rows[i] + cols[i]);
    if (!(p[i] > 0.0)) throw DomainError("chi-square null parameters need positive marginals");
  }
  CompensatedSum mu;
  CompensatedSum gamma_sq;
  for (std::size_t i = 0; i < m; ++i) {
    const double pii = joint(i, i);
    mu += 1.0 - pii / p[i];
    const double d = (p[i] - pii) / p[i];
    gamma_sq += d * d;
    for (std::size_t j = i + 1; j < m; ++j) {
      const double s = joint(i, j) + joint(j, i);
      // Each unordered pair appears twice in the sum over i != j.
      gamma_sq += 2.0 * s * s / (4.0 * p[i] * p[j]);
    }
  }
  return {mu.value(), gamma_sq.value()};
}

double generalized_binomial(double a, unsigned k) {
  double r = 1.0;
  for (unsigned i = 0; i < k; ++i) r *= (a - static_cast<double>(i)) / static_cast<double>(i + 1);
  return r;
}

EstimateWithCI entropy_ci(const CountVector& c, Alpha alpha, double level) {
  check_level(level);
  if (c.n() < 2) throw DomainError("entropy interval needs n >= 2");
  const ProbVector phat = c.frequencies();
  const double estimate = renyi_entropy(phat, alpha);
  if (c.observed_categories() < 2) {
    throw DegenerateError("all observations fall in one category; the entropy CLT variance is zero");
  }
  const double a = alpha.value();
  CompensatedSum mean;
  for (double v : phat) {
    if (v > 0.0) mean += a * std::pow(v, a);
  }
  CompensatedSum var;
  for (double v : phat) {
    if (v > 0.0) {
      const double d = a * std::pow(v, a - 1.0) - mean.value();
      var += v * d * d;
    }
  }
  const double cv = std::sqrt(std::max(var.value(), 0.0)) / mean.value();
  if (!(cv > kDegenerateCv)) {
    throw DegenerateError("plug-in distribution is uniform (degenerate projection); use uniformity_test");
  }
  const double n = static_cast<double>(c.n());
  const double se = cv * a / ((1.0 - a) * std::sqrt(n));
  EstimateWithCI r = make_interval(estimate, se, level, c.n(), c.observed_categories(), CiMethod::thm1);
  r.diagnostics = ld_diagnostic(phat, c.n(), alpha);
  return r;
}

EstimateWithCI hill_ci(const CountVector& c, Alpha alpha, double level) {
  EstimateWithCI h = entropy_ci(c, alpha, level);
  h.estimate = std::exp(h.estimate);
  h.lower = std::exp(h.lower);
  h.upper = std::exp(h.upper);
  h.std_error *= h.estimate;
  return h;
}

EstimateWithCI divergence_ci(const CountVector& cx, const CountVector& cy, Alpha alpha, double level) {
  check_level(level);
  if (cx.size() != cy.size()) throw ShapeError("samples must share the category universe");
  const ProbVector phat = cx.frequencies();
  const ProbVector qhat = cy.frequencies();
  const CrossPowerSum s = cross_power_sum(phat, qhat, alpha);
  if (!(s.value > 0.0)) throw DomainError("samples share no observed category");
  const double estimate = renyi_divergence(phat, qhat, alpha);
  const SplitProjection v = split_projection_v(phat, qhat, alpha);
  const double nx = static_cast<double>(cx.n());
  const double ny = static_cast<double>(cy.n());
  const double var_s = v.var_a / nx + v.var_b / ny;
  if (!(std::sqrt(v.var_a + v.var_b) / s.value > kDegenerateCv)) {
    throw DegenerateError("empirical marginals coincide (degenerate projection); use equality_test");
  }
  const double se = std::sqrt(var_s) / (s.value * (1.0 - alpha.value()));
  std::size_t m = 0;
  for (std::size_t i = 0; i < cx.size(); ++i) {
    if (cx[i] > 0 || cy[i] > 0) ++m;
  }
  const auto n_eff = static_cast<std::uint64_t>(std::llround(2.0 / (1.0 / nx + 1.0 / ny)));
  EstimateWithCI r = make_interval(estimate, se, level, n_eff, m, CiMethod::thm2);
  r.diagnostics = ld_diagnostic(phat, qhat, n_eff, alpha);
  return r;
}

EstimateWithCI divergence_ci(const JointCountTable& joint, Alpha alpha, double level) {
  check_level(level);
  const CountVector cx = joint.row_counts();
  const CountVector cy = joint.col_counts();
  const ProbVector phat = cx.frequencies();
  const ProbVector qhat = cy.frequencies();
  const CrossPowerSum s = cross_power_sum(phat, qhat, alpha);
  if (!(s.value > 0.0)) throw DomainError("samples share no observed category");
  const double a = alpha.value();
  const std::size_t m = joint.m();
  std::vector<double> left(m);
  std::vector<double> right(m);
  for (std::size_t i = 0; i < m; ++i) {
    left[i] = phat[i] > 0.0 ? a * pow_or_zero(qhat[i] / phat[i], 1.0 - a) : 0.0;
    right[i] = qhat[i] > 0.0 ? (1.0 - a) * pow_or_zero(phat[i] / qhat[i], a) : 0.0;
  }
  const double n = static_cast<double>(joint.n());
  CompensatedSum mean;
  for (const auto& [key, c] : joint.cells()) {
    mean += static_cast<double>(c) / n * (left[key.first] + right[key.second]);
  }
  CompensatedSum var;
  for (const auto& [key, c] : joint.cells()) {
    const double d = left[key.first] + right[key.second] - mean.value();
    var += static_cast<double>(c) / n * d * d;
  }
  const double sd = std::sqrt(std::max(var.value(), 0.0));
  if (!(sd / s.value > kDegenerateCv)) {
    throw DegenerateError("empirical marginals coincide (degenerate projection); use equality_test");
  }
  const double se = sd / (std::sqrt(n) * s.value * (1.0 - a));
  std::size_t m_union = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (cx[i] > 0 || cy[i] > 0) ++m_union;
  }
  EstimateWithCI r = make_interval(renyi_divergence(phat, qhat, alpha), se, level, joint.n(), m_union,
                                   CiMethod::thm2);
  r.diagnostics = ld_diagnostic(phat, qhat, joint.n(), alpha);
  return r;
}

double uniform_entropy_statistic(const CountVector& c, Alpha alpha) {
  const std::size_t m = c.size();
  if (m < 2) throw DomainError("uniformity statistic needs m >= 2");
  if (c.n() <= m) {
    throw UndefinedStatisticError("normalized uniform entropy statistic is undefined for n <= m (n = " +
                                  std::to_string(c.n()) + ", m = " + std::to_string(m) + ")");
  }
  const double a = alpha.value();
  const double n = static_cast<double>(c.n());
  const double dm = static_cast<double>(m);
  // Centered at the exact null mean m - 1 of the Pearson statistic.
  const double df = dm - 1.0;
  const double h = renyi_entropy(c.frequencies(), alpha);
  const double centering = std::log1p(generalized_binomial(a, 2) * df / n) / (1.0 - a);
  return n * (h - std::log(dm) - centering) / (a * std::sqrt(df / 2.0));
}

double pearson_uniformity_statistic(const CountVector& c) {
  const std::size_t m = c.size();
  if (m < 2) throw DomainError("uniformity statistic needs m >= 2");
  const double x2 = pearson_chi_square(c, ProbVector::uniform(m));
  const double df = static_cast<double>(m) - 1.0;
  return (x2 - df) / std::sqrt(2.0 * df);
}

TestReport uniformity_test(const CountVector& c, Alpha alpha, UniformityMethod method) {
  if (c.n() < 2) throw DomainError("uniformity test needs n >= 2");
  const std::size_t m = c.size();
  const double df = static_cast<double>(m) - 1.0;
  TestReport r;
  r.sidedness = Sidedness::two_sided;
  r.m = m;
  r.n = c.n();
  if (method == UniformityMethod::entropy) {
    r.statistic = uniform_entropy_statistic(c, alpha);
    const double a = alpha.value();
    const double n = static_cast<double>(c.n());
    r.raw_statistic = n * (renyi_entropy(c.frequencies(), alpha) - std::log(static_cast<double>(m)));
    r.null_mean = n * std::log1p(generalized_binomial(a, 2) * df / n) / (1.0 - a);
    r.null_sd = a * std::sqrt(df / 2.0);
    r.method = TestMethod::thm3;
  } else {
    r.statistic = pearson_uniformity_statistic(c);
    r.raw_statistic = pearson_chi_square(c, ProbVector::uniform(m));
    r.null_mean = df;
    r.null_sd = std::sqrt(2.0 * df);
    r.method = TestMethod::lemma2i;
  }
  r.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(r.statistic)));
  return r;
}

TestReport equality_test(const CountVector& cx, const CountVector& cy, Alpha alpha) {
  if (cx.size() != cy.size()) throw ShapeError("samples must share the category universe");
  std::size_t m = 0;
  for (std::size_t i = 0; i < cx.size(); ++i) {
    if (cx[i] > 0 || cy[i] > 0) ++m;
  }
  if (m < 2) throw DomainError("equality test needs at least 2 observed categories");
  const double a = alpha.value();
  const double nx = static_cast<double>(cx.n());
  const double ny = static_cast<double>(cy.n());
  // Harmonic-mean size: Cov(phat - qhat) = (1/nx + 1/ny) (diag p - p p^T).
  const double n_eff = 2.0 / (1.0 / nx + 1.0 / ny);
  const double s = cross_power_sum(cx.frequencies(), cy.frequencies(), alpha).value;
  const double df = static_cast<double>(m) - 1.0;
  TestReport r;
  r.raw_statistic = n_eff * (s - 1.0) / (a * (a - 1.0));
  r.null_mean = df;
  r.null_sd = std::sqrt(2.0 * df);
  r.statistic = (r.raw_statistic - r.null_mean) / r.null_sd;
  r.p_value = normal_sf(r.statistic);
  r.sidedness = Sidedness::upper;
  r.m = m;
  r.n = static_cast<std::uint64_t>(std::llround(n_eff));
  r.method = TestMethod::thm4;
  return r;
}

TestReport equality_test(const JointCountTable& joint, Alpha alpha) {
  const CountVector cx = joint.row_counts();
  const CountVector cy = joint.col_counts();
  std::vector<std::size_t> index(joint.m(), joint.m());
  std::size_t m = 0;
  for (std::size_t i = 0; i < joint.m(); ++i) {
    if (cx[i] > 0 || cy[i] > 0) index[i] = m++;
  }
  if (m < 2) throw DomainError("equality test needs at least 2 observed categories");
  const double n = static_cast<double>(joint.n());

  // Symmetrized plug-in joint, shrunk toward the product of its marginal with
  // weight 1 / (1 + n_ij) per cell (n_ij the symmetrized cell count).
  std::vector<double> sym(m * m, 0.0);
  std::vector<double> sym_counts(m * m, 0.0);
  for (const auto& [key, c] : joint.cells()) {
    const std::size_t i = index[key.first];
    const std::size_t j = index[key.second];
    const double half = 0.5 * static_cast<double>(c);
    sym_counts[i * m + j] += half;
    sym_counts[j * m + i] += half;
  }
  std::vector<double> r(m, 0.0);
  for (std::size_t i = 0; i < joint.m(); ++i) {
    if (index[i] < m) r[index[i]] = 0.5 * (static_cast<double>(cx[i]) + static_cast<double>(cy[i])) / n;
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double cnt = sym_counts[i * m + j];
      const double w = 1.0 / (1.0 + cnt);
      sym[i * m + j] = (1.0 - w) * cnt / n + w * r[i] * r[j];
      total += sym[i * m + j];
    }
  }
  for (double& v : sym) v /= total.value();
  const ChiSquareNullParams params = chi_square_null_params(JointDistribution(m, std::move(sym)));

  const double a = alpha.value();
  const double s = cross_power_sum(cx.frequencies(), cy.frequencies(), alpha).value;
  TestReport rep;
  rep.raw_statistic = n * (s - 1.0) / (a * (a - 1.0));
  rep.null_mean = params.mu;
  rep.null_sd = std::sqrt(2.0 * params.gamma_sq);
  if (!(rep.null_sd > 0.0)) throw DomainError("estimated null scale is zero; equality test undefined");
  rep.statistic = (rep.raw_statistic - rep.null_mean) / rep.null_sd;
  rep.p_value = normal_sf(rep.statistic);
  rep.sidedness = Sidedness::upper;
  rep.m = m;
  rep.n = joint.n();
  rep.method = TestMethod::thm4;
  return rep;
}

CountVector binomial_thinning(const CountVector& c, double tau, RandomStream& stream) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("thinning probability must lie in (0, 1)");
  std::vector<std::uint64_t> out(c.size());
  std::uint64_t kept = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out[i] = stream.binomial(c[i], tau);
    kept += out[i];
  }
  if (kept == 0) throw DomainError("thinning removed every observation");
  return CountVector(std::move(out));
}

}  // namespace renydiv
