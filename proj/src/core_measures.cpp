#include "renydiv/core_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "renydiv/errors.hpp"

namespace renydiv {

Alpha::Alpha(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw DomainError("alpha must lie in (0, 1), got " + std::to_string(value));
  }
}

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw DomainError("probability vector must have at least one category");
  CompensatedSum total;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double v = probs_[i];
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("probability at index " + std::to_string(i) + " is negative or not finite");
    }
    total += v;
  }
  if (std::abs(total.value() - 1.0) > kSumTolerance) {
    throw DomainError("probabilities sum to " + std::to_string(total.value()) + ", expected 1");
  }
}

ProbVector ProbVector::uniform(std::size_t m) {
  if (m == 0) throw DomainError("uniform distribution needs m >= 1");
  return ProbVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

ProbVector ProbVector::normalized(std::span<const double> weights) {
  CompensatedSum total;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weights must be finite and non-negative");
    total += w;
  }
  if (!(total.value() > 0.0)) throw DomainError("weights must have a positive total");
  std::vector<double> probs(weights.size());
  const double t = total.value();
  std::transform(weights.begin(), weights.end(), probs.begin(), [t](double w) { return w / t; });
  return ProbVector(std::move(probs));
}

ProbVector ProbVector::from_counts(std::span<const std::uint64_t> counts) {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw DomainError("count vector has zero total");
  std::vector<double> probs(counts.size());
  const double dn = static_cast<double>(n);
  std::transform(counts.begin(), counts.end(), probs.begin(),
                 [dn](std::uint64_t c) { return static_cast<double>(c) / dn; });
  return ProbVector(std::move(probs));
}

std::size_t ProbVector::support_size() const noexcept {
  return static_cast<std::size_t>(std::count_if(probs_.begin(), probs_.end(), [](double v) { return v > 0.0; }));
}

double ProbVector::min_positive() const noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (double v : probs_) {
    if (v > 0.0) best = std::min(best, v);
  }
  return best;
}

double power_sum(const ProbVector& p, Alpha alpha) {
  CompensatedSum s;
  for (double v : p) {
    if (v > 0.0) s += std::pow(v, alpha.value());
  }
  return s.value();
}

CrossPowerSum cross_power_sum(const ProbVector& p, const ProbVector& q, Alpha alpha) {
  if (p.size() != q.size()) {
    throw ShapeError("distributions have different category counts: " + std::to_string(p.size()) + " vs " +
                     std::to_string(q.size()));
  }
  const double a = alpha.value();
  CompensatedSum s;
  CompensatedSum off;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (pi > 0.0 && qi > 0.0) {
      s += std::pow(pi, a) * std::pow(qi, 1.0 - a);
    } else if (pi > 0.0) {
      off += pi;
    }
  }
  return {s.value(), off.value()};
}

double renyi_entropy(const ProbVector& p, Alpha alpha) {
  return std::log(power_sum(p, alpha)) / (1.0 - alpha.value());
}

double renyi_divergence(const ProbVector& p, const ProbVector& q, Alpha alpha) {
  const double s = cross_power_sum(p, q, alpha).value;
  // S <= 1 by Hoelder; clamp rounding so D stays non-negative.
  return std::log(std::min(s, 1.0)) / (alpha.value() - 1.0);
}

double tsallis_entropy(const ProbVector& p, Alpha alpha) {
  return (power_sum(p, alpha) - 1.0) / (1.0 - alpha.value());
}

double hill_number(const ProbVector& p, Alpha alpha) {
  return std::pow(power_sum(p, alpha), 1.0 / (1.0 - alpha.value()));
}

}  // namespace renydiv
