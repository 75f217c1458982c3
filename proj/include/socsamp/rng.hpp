#pragma once

#include <cstdint>
#include <random>

namespace socsamp {

/// Seed plus number of raw 64-bit draws consumed; enough to restore a stream.
struct RngPosition {
  std::uint64_t seed = 0;
  std::uint64_t draws = 0;

  bool operator==(const RngPosition&) const = default;
};

/**
 * Seeded random stream used by every stochastic component.
 *
 * Wraps mt19937_64 (whose output sequence is fixed by the standard) and maps
 * raw words to doubles and bounded integers itself, so a given seed produces
 * the same values on every platform. Draws are counted so the stream can be
 * checkpointed and resumed.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  static Rng at(RngPosition position) {
    Rng rng(position.seed);
    rng.engine_.discard(position.draws);
    rng.draws_ = position.draws;
    return rng;
  }

  std::uint64_t next() {
    ++draws_;
    return engine_();
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  bool bernoulli(double p) { return uniform() < p; }

  RngPosition position() const { return {seed_, draws_}; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  std::uint64_t draws_ = 0;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-mode split: stream `stream` of trial `index` under `base`.
/// Adding trials never changes the seeds of earlier ones.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(base ^ (stream * 0xd1b54a32d192ed03ULL)) + index);
}

}  // namespace socsamp
