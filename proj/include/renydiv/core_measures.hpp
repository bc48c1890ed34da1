#pragma once

// Power sums, Renyi entropy/divergence, Tsallis entropy and Hill numbers of
// explicit finite distributions. All logarithms are natural (nats).
//
// Conventions
//   - 0^a := 0, so zero-probability categories contribute nothing.
//   - In the cross power sum a category with p_i > 0 and q_i = 0 contributes
//     0; the mass of p on such categories is reported alongside the value.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace renydiv {

// Renyi exponent, restricted to the open interval (0, 1).
class Alpha {
 public:
  explicit Alpha(double value);
  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

 private:
  double value_;
};

// Finite discrete probability distribution over m >= 1 categories.
class ProbVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  // Throws DomainError unless entries are non-negative and sum to 1.
  explicit ProbVector(std::vector<double> probs);

  static ProbVector uniform(std::size_t m);
  // Divides by the total. Throws DomainError if the total is not positive.
  static ProbVector normalized(std::span<const double> weights);
  static ProbVector from_counts(std::span<const std::uint64_t> counts);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }
  const std::vector<double>& values() const noexcept { return probs_; }
  auto begin() const noexcept { return probs_.begin(); }
  auto end() const noexcept { return probs_.end(); }

  std::size_t support_size() const noexcept;
  double min_positive() const noexcept;

 private:
  std::vector<double> probs_;
};

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct CrossPowerSum {
  double value = 0.0;
  // Mass of p on categories where q is zero (those terms contribute 0).
  double p_mass_off_q_support = 0.0;
};

double power_sum(const ProbVector& p, Alpha alpha);
CrossPowerSum cross_power_sum(const ProbVector& p, const ProbVector& q, Alpha alpha);

double renyi_entropy(const ProbVector& p, Alpha alpha);
double renyi_divergence(const ProbVector& p, const ProbVector& q, Alpha alpha);
double tsallis_entropy(const ProbVector& p, Alpha alpha);
// Effective number of classes, exp(H_alpha).
double hill_number(const ProbVector& p, Alpha alpha);

}  // namespace renydiv
