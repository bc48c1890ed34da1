#include "renydiv/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "renydiv/errors.hpp"

namespace renydiv {

namespace {

ProbVector marginal(std::size_t m, const std::vector<double>& cells, bool rows) {
  std::vector<CompensatedSum> acc(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      acc[rows ? i : j] += cells[i * m + j];
    }
  }
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = acc[k].value();
  // Renormalize away rounding so the marginal passes ProbVector validation.
  return ProbVector::normalized(out);
}

ProjectionMoments finish(double mean, double variance) {
  variance = std::max(variance, 0.0);
  return {mean, variance, std::sqrt(variance) / std::abs(mean)};
}

// Two-pass moments of W over the positive entries of p.
ProjectionMoments w_moments(const ProbVector& p, double a) {
  CompensatedSum mean;
  for (double v : p) {
    if (v > 0.0) mean += v * a * std::pow(v, a - 1.0);
  }
  const double mu = mean.value();
  CompensatedSum var;
  for (double v : p) {
    if (v > 0.0) {
      const double d = a * std::pow(v, a - 1.0) - mu;
      var += v * d * d;
    }
  }
  return finish(mu, var.value());
}

}  // namespace

JointDistribution::JointDistribution(std::size_t m, std::vector<double> cells)
    : m_(m),
      cells_(std::move(cells)),
      row_(m > 0 && cells_.size() == m * m ? marginal(m, cells_, true) : ProbVector::uniform(1)),
      col_(m > 0 && cells_.size() == m * m ? marginal(m, cells_, false) : ProbVector::uniform(1)) {
  if (m == 0 || cells_.size() != m * m) {
    throw ShapeError("joint distribution needs m*m cells with m >= 1");
  }
  CompensatedSum total;
  for (double v : cells_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("joint cell probabilities must be non-negative");
    total += v;
  }
  if (std::abs(total.value() - 1.0) > ProbVector::kSumTolerance) {
    throw DomainError("joint probabilities sum to " + std::to_string(total.value()) + ", expected 1");
  }
}

JointDistribution JointDistribution::product(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) throw ShapeError("product joint needs marginals of equal size");
  const std::size_t m = p.size();
  std::vector<double> cells(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) cells[i * m + j] = p[i] * q[j];
  }
  return JointDistribution(m, std::move(cells));
}

JointDistribution JointDistribution::correlated(const ProbVector& p, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  const std::size_t m = p.size();
  std::vector<double> cells(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      cells[i * m + j] = (1.0 - rho) * p[i] * p[j] + (i == j ? rho * p[i] : 0.0);
    }
  }
  return JointDistribution(m, std::move(cells));
}

ProjectionMoments projection_w_moments(const ProbVector& p, Alpha alpha) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) {
      throw DomainError("W is undefined on zero-probability category " + std::to_string(i));
    }
  }
  return w_moments(p, alpha.value());
}

ProjectionMoments projection_v_moments(const JointDistribution& joint, Alpha alpha) {
  const std::size_t m = joint.m();
  const ProbVector& p = joint.row_marginal();
  const ProbVector& q = joint.col_marginal();
  for (std::size_t i = 0; i < m; ++i) {
    if (!(p[i] > 0.0 && q[i] > 0.0)) {
      throw DomainError("V needs strictly positive marginals; category " + std::to_string(i) + " has zero mass");
    }
  }
  const double a = alpha.value();
  std::vector<double> left(m);
  std::vector<double> right(m);
  for (std::size_t i = 0; i < m; ++i) {
    left[i] = a * std::pow(q[i] / p[i], 1.0 - a);
    right[i] = (1.0 - a) * std::pow(p[i] / q[i], a);
  }
  CompensatedSum mean;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = joint(i, j);
      if (w > 0.0) mean += w * (left[i] + right[j]);
    }
  }
  const double mu = mean.value();
  CompensatedSum var;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = joint(i, j);
      if (w > 0.0) {
        const double d = left[i] + right[j] - mu;
        var += w * d * d;
      }
    }
  }
  return finish(mu, var.value());
}

SplitProjection split_projection_v(const ProbVector& p, const ProbVector& q, Alpha alpha) {
  if (p.size() != q.size()) throw ShapeError("split projection needs equal category counts");
  const double a = alpha.value();
  CompensatedSum ea;
  CompensatedSum eb;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] > 0.0) {
      ea += p[i] * a * std::pow(q[i] / p[i], 1.0 - a);
      eb += q[i] * (1.0 - a) * std::pow(p[i] / q[i], a);
    }
  }
  const double mean_a = ea.value();
  const double mean_b = eb.value();
  CompensatedSum va;
  CompensatedSum vb;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] > 0.0) {
      const double da = a * std::pow(q[i] / p[i], 1.0 - a) - mean_a;
      const double db = (1.0 - a) * std::pow(p[i] / q[i], a) - mean_b;
      va += p[i] * da * da;
      vb += q[i] * db * db;
    }
  }
  // Mass of p (or q) off the shared support takes the value 0 in A (or B).
  double off_p = 0.0;
  double off_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && !(q[i] > 0.0)) off_p += p[i];
    if (q[i] > 0.0 && !(p[i] > 0.0)) off_q += q[i];
  }
  return {mean_a + mean_b, std::max(va.value() + off_p * mean_a * mean_a, 0.0),
          std::max(vb.value() + off_q * mean_b * mean_b, 0.0)};
}

std::string_view to_string(Advisory a) noexcept {
  switch (a) {
    case Advisory::pass: return "pass";
    case Advisory::marginal: return "marginal";
    case Advisory::fail: return "fail";
    case Advisory::not_applicable: return "not_applicable";
  }
  return "not_applicable";
}

Advisory classify_condition(std::optional<double> quotient) noexcept {
  if (!quotient) return Advisory::not_applicable;
  if (*quotient < kPassThreshold) return Advisory::pass;
  if (*quotient < kMarginalThreshold) return Advisory::marginal;
  return Advisory::fail;
}

namespace {

LDReport base_report(double p_star, std::size_t m, std::uint64_t n) {
  if (n == 0) throw DomainError("LD diagnostic needs n >= 1");
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  LDReport r;
  r.p_star = p_star;
  r.ld_ratio = 1.0 / (dn * p_star);
  r.m_over_n = dm / dn;
  r.m_sq_over_n = dm * dm / dn;
  r.ld_advisory = classify_condition(r.ld_ratio);
  r.uniform_advisory = classify_condition(r.m_sq_over_n);
  return r;
}

std::optional<double> entropy_quotient(const ProbVector& p, std::uint64_t n, double a) {
  const ProjectionMoments w = w_moments(p, a);
  if (!(w.cv > 1e-12)) return std::nullopt;
  CompensatedSum s;
  for (double v : p) {
    if (v > 0.0) s += std::pow(v, a - 1.0);
  }
  return s.value() / std::sqrt(static_cast<double>(n) * w.variance);
}

}  // namespace

LDReport ld_diagnostic(const ProbVector& p, std::uint64_t n, Alpha alpha) {
  LDReport r = base_report(p.min_positive(), p.support_size(), n);
  r.entropy_condition = entropy_quotient(p, n, alpha.value());
  r.entropy_advisory = classify_condition(r.entropy_condition);
  return r;
}

LDReport ld_diagnostic(const ProbVector& p, const ProbVector& q, std::uint64_t n, Alpha alpha) {
  if (p.size() != q.size()) throw ShapeError("LD diagnostic needs equal category counts");
  const double p_star = std::min(p.min_positive(), q.min_positive());
  std::size_t m = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 || q[i] > 0.0) ++m;
  }
  LDReport r = base_report(p_star, m, n);
  const double a = alpha.value();
  r.entropy_condition = entropy_quotient(p, n, a);
  r.entropy_advisory = classify_condition(r.entropy_condition);

  const SplitProjection v = split_projection_v(p, q, alpha);
  const double var_v = v.var_a + v.var_b;
  if (std::sqrt(var_v) / v.mean > 1e-12) {
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0 && q[i] > 0.0) {
        s += std::pow(q[i] / p[i], 1.0 - a);
        s += std::pow(p[i] / q[i], a);
      }
    }
    r.divergence_condition = s.value() / std::sqrt(static_cast<double>(n) * var_v);
  }
  r.divergence_advisory = classify_condition(r.divergence_condition);

  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  r.degenerate_divergence_condition = std::max(1.0 / (dn * dm * p_star * p_star), dm / (dn * p_star));
  r.degenerate_divergence_advisory = classify_condition(r.degenerate_divergence_condition);
  return r;
}

}  // namespace renydiv
