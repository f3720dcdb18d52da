#ifndef PCDAG_RNG_HPP
#define PCDAG_RNG_HPP

#include <cstdint>
#include <random>

namespace pcdag {

// Seedable random source. Derived streams come from the stored seed (not
// from engine state), so stream(k) is reproducible no matter how much the
// parent has been consumed. Replicate-level parallelism hands each worker
// its own derived stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Independent child stream identified by a counter.
  Rng stream(std::uint64_t id) const { return Rng(derive_seed(seed_, id)); }

  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (id + 1));
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  bool bernoulli(double prob) { return std::bernoulli_distribution(prob)(engine_); }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  double student_t(double df) { return std::student_t_distribution<double>(df)(engine_); }

  double cauchy() { return std::cauchy_distribution<double>(0.0, 1.0)(engine_); }

  // Inclusive on both ends.
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace pcdag

#endif
