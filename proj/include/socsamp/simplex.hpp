#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "socsamp/rng.hpp"

namespace socsamp {

struct Tolerances {
  double sum = 1e-9;
  double negativity = 1e-12;
};

inline constexpr Tolerances kDefaultTolerances{};

class Distribution;
class OpinionSample;

/// Validates, clamps tiny negatives to zero and renormalizes.
/// Throws NegativeMass / BadSum when the input is not a distribution.
Distribution make_distribution(std::span<const double> weights, const Tolerances& tol = kDefaultTolerances);

/// e_m in R^M (0-based m). Throws IndexOutOfRange unless m < M.
Distribution elementary(std::size_t m, std::size_t opinions);

/// Normalized histogram of the sample. Throws EmptySample on n = 0.
Distribution empirical_histogram(const OpinionSample& sample);

/// A point on the probability simplex over M opinions (indexed 0..M-1).
class Distribution {
 public:
  Distribution() = default;

  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double operator[](std::size_t m) const { return weights_[m]; }

  bool operator==(const Distribution&) const = default;

 private:
  explicit Distribution(std::vector<double> w) : weights_(std::move(w)) {}

  friend Distribution make_distribution(std::span<const double>, const Tolerances&);
  friend Distribution elementary(std::size_t, std::size_t);
  friend Distribution empirical_histogram(const OpinionSample&);

  std::vector<double> weights_;
};

/// Row of a sampling matrix: opinion weights summing to at most one, with
/// the remainder being the probability of staying silent.
class SubDistribution {
 public:
  SubDistribution() = default;
  /// Throws NegativeMass, or BadSum when the weights exceed one.
  SubDistribution(std::vector<double> weights, const Tolerances& tol = kDefaultTolerances);
  SubDistribution(std::vector<double> weights, double silent_mass);
  explicit SubDistribution(const Distribution& d);

  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double silent_mass() const noexcept { return silent_; }

 private:
  std::vector<double> weights_;
  double silent_ = 0.0;
};

/// Y_i(t): either silence (the zero vector) or one opinion (e_m).
class Message {
 public:
  static constexpr Message silent() { return Message(kSilent); }
  static constexpr Message opinion(std::size_t m) { return Message(m); }

  constexpr bool is_silent() const noexcept { return value_ == kSilent; }
  constexpr std::size_t index() const noexcept { return value_; }

  constexpr bool operator==(const Message&) const = default;

 private:
  static constexpr std::size_t kSilent = static_cast<std::size_t>(-1);
  constexpr explicit Message(std::size_t v) : value_(v) {}
  std::size_t value_;
};

/// Initial opinions X_i, each in [0, M).
class OpinionSample {
 public:
  OpinionSample(std::size_t opinions, std::vector<std::size_t> values);

  std::size_t opinions() const noexcept { return opinions_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const std::size_t> values() const noexcept { return values_; }
  std::size_t operator[](std::size_t i) const { return values_[i]; }

 private:
  std::size_t opinions_;
  std::vector<std::size_t> values_;
};

/// Inverse-CDF draw with one uniform. A row with zero silent mass never
/// returns Silent, even when its weights sum to 1 - ulp.
Message sample_message(std::span<const double> weights, double silent_mass, Rng& rng);
Message sample_message(const SubDistribution& p, Rng& rng);
Message sample_message(const Distribution& p, Rng& rng);

/// n i.i.d. opinions from `law`.
OpinionSample draw_opinions(const Distribution& law, std::size_t n, Rng& rng);

}  // namespace socsamp
