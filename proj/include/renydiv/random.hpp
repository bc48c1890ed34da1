#pragma once

#include <cstdint>
#include <random>

namespace renydiv {

// Seeded pseudo-random stream. Streams are cheap to create; derive one per
// task with child() instead of sharing a stream across threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(mix(seed)) {}

  // Independent stream for replicate/task `index` under `master`. The result
  // depends only on (master, index), never on scheduling.
  static RandomStream child(std::uint64_t master, std::uint64_t index) {
    return RandomStream(mix(master) ^ mix(index + 0x632be59bd9b4e019ULL));
  }

  std::mt19937_64& engine() noexcept { return engine_; }

  std::uint64_t binomial(std::uint64_t trials, double prob) {
    if (trials == 0 || prob <= 0.0) return 0;
    if (prob >= 1.0) return trials;
    std::binomial_distribution<std::uint64_t> dist(trials, prob);
    return dist(engine_);
  }

  double normal() { return std::normal_distribution<double>()(engine_); }
  double uniform() { return std::uniform_real_distribution<double>()(engine_); }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace renydiv
