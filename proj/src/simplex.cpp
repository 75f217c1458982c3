#include "socsamp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "socsamp/error.hpp"

namespace socsamp {

Distribution make_distribution(std::span<const double> weights, const Tolerances& tol) {
  if (weights.empty()) throw Error(ErrorCode::BadSum, "empty weight vector");
  double sum = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    const double w = weights[m];
    if (!std::isfinite(w)) throw Error(ErrorCode::BadSum, "non-finite weight at index " + std::to_string(m));
    if (w < -tol.negativity)
      throw Error(ErrorCode::NegativeMass, "weight " + std::to_string(w) + " at index " + std::to_string(m));
    sum += std::max(w, 0.0);
  }
  if (std::abs(sum - 1.0) > tol.sum)
    throw Error(ErrorCode::BadSum, "weights sum to " + std::to_string(sum));

  std::vector<double> w(weights.size());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = std::max(weights[m], 0.0);
  if (sum != 1.0)
    for (double& x : w) x /= sum;
  return Distribution(std::move(w));
}

Distribution elementary(std::size_t m, std::size_t opinions) {
  if (m >= opinions)
    throw Error(ErrorCode::IndexOutOfRange,
                "opinion " + std::to_string(m) + " outside [0, " + std::to_string(opinions) + ")");
  std::vector<double> w(opinions, 0.0);
  w[m] = 1.0;
  return Distribution(std::move(w));
}

SubDistribution::SubDistribution(std::vector<double> weights, const Tolerances& tol)
    : weights_(std::move(weights)) {
  double sum = 0.0;
  for (double& w : weights_) {
    if (!(w >= -tol.negativity)) throw Error(ErrorCode::NegativeMass, "sub-distribution weight " + std::to_string(w));
    w = std::max(w, 0.0);
    sum += w;
  }
  if (sum > 1.0 + tol.sum) throw Error(ErrorCode::BadSum, "sub-distribution weights sum to " + std::to_string(sum));
  silent_ = std::max(0.0, 1.0 - sum);
}

SubDistribution::SubDistribution(std::vector<double> weights, double silent_mass)
    : weights_(std::move(weights)), silent_(silent_mass) {
  if (silent_mass < 0.0 || silent_mass > 1.0)
    throw Error(ErrorCode::BadSum, "silent mass " + std::to_string(silent_mass) + " outside [0, 1]");
}

SubDistribution::SubDistribution(const Distribution& d)
    : weights_(d.weights().begin(), d.weights().end()), silent_(0.0) {}

OpinionSample::OpinionSample(std::size_t opinions, std::vector<std::size_t> values)
    : opinions_(opinions), values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] >= opinions_)
      throw Error(ErrorCode::IndexOutOfRange,
                  "opinion of node " + std::to_string(i) + " is " + std::to_string(values_[i]) +
                      ", alphabet size " + std::to_string(opinions_));
}

Message sample_message(std::span<const double> weights, double silent_mass, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = weights.size();
  for (std::size_t m = 0; m < weights.size(); ++m) {
    if (weights[m] <= 0.0) continue;
    acc += weights[m];
    last = m;
    if (u < acc) return Message::opinion(m);
  }
  if (silent_mass > 0.0 || last == weights.size()) return Message::silent();
  return Message::opinion(last);
}

Message sample_message(const SubDistribution& p, Rng& rng) {
  return sample_message(p.weights(), p.silent_mass(), rng);
}

Message sample_message(const Distribution& p, Rng& rng) { return sample_message(p.weights(), 0.0, rng); }

Distribution empirical_histogram(const OpinionSample& sample) {
  if (sample.size() == 0) throw Error(ErrorCode::EmptySample, "no opinions");
  std::vector<double> counts(sample.opinions(), 0.0);
  for (std::size_t x : sample.values()) counts[x] += 1.0;
  const double n = static_cast<double>(sample.size());
  for (double& c : counts) c /= n;
  return Distribution(std::move(counts));
}

OpinionSample draw_opinions(const Distribution& law, std::size_t n, Rng& rng) {
  std::vector<std::size_t> values(n);
  for (auto& x : values) x = sample_message(law, rng).index();
  return OpinionSample(law.size(), std::move(values));
}

}  // namespace socsamp
