#include "socsamp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "socsamp/error.hpp"

namespace socsamp {

NetworkState init_state(const OpinionSample& sample) {
  NetworkState state{0, Matrix(sample.size(), sample.opinions())};
  for (std::size_t i = 0; i < sample.size(); ++i) state.q(i, sample[i]) = 1.0;
  return state;
}

double eval_schedule(const StepSchedule& schedule, std::size_t t) {
  const double k = static_cast<double>(t) + 1.0;
  double value = schedule.c;
  switch (schedule.kind) {
    case ScheduleKind::Constant: break;
    case ScheduleKind::Harmonic: value = schedule.c / k; break;
    case ScheduleKind::Square: value = schedule.c / (k * k); break;
  }
  return schedule.uncapped ? value : std::min(schedule.cap, value);
}

void validate(const StepSchedule& schedule) {
  if (!(schedule.c > 0.0) || !std::isfinite(schedule.c))
    throw Error(ErrorCode::BadParameters, "schedule constant must be positive");
  if (!(schedule.cap > 0.0 && schedule.cap <= 1.0))
    throw Error(ErrorCode::BadParameters, "schedule cap must lie in (0, 1]");
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::Harmonic: return "harmonic";
    case ScheduleKind::Square: return "square";
  }
  return "unknown";
}

SubDistribution SamplingMatrix::sub_distribution(std::size_t i) const {
  const auto r = p.row(i);
  return SubDistribution(std::vector<double>(r.begin(), r.end()), silent[i]);
}

Matrix EdgeWeights::dense_w(const Graph& g) const {
  Matrix out(g.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto nb = g.neighbors(i);
    for (std::size_t k = 0; k < nb.size(); ++k) out(i, nb[k]) = w[g.slot(i, k)];
  }
  return out;
}

double condition1_residual(const Graph& g, const EdgeWeights& weights) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double row = 0.0;
    for (std::size_t k = 0; k < g.degree(i); ++k) row += weights.w[g.slot(i, k)];
    worst = std::max(worst, std::abs(row - weights.a[i] - weights.b[i]));
  }
  return worst;
}

AlgorithmVariant AlgorithmVariant::censored_exchange(double edge_weight) {
  if (!(edge_weight > 0.0)) throw Error(ErrorCode::BadParameters, "censored exchange weight must be positive");
  AlgorithmVariant v(Kind::CensoredExchange);
  v.edge_weight_ = edge_weight;
  return v;
}

AlgorithmVariant AlgorithmVariant::custom(CustomRule rule) {
  if (!rule.sampling || !rule.realize || !rule.expect || !rule.limit)
    throw Error(ErrorCode::BadParameters, "custom rule needs sampling, realize, expect and limit callbacks");
  AlgorithmVariant v(Kind::Custom);
  v.rule_ = std::make_shared<const CustomRule>(std::move(rule));
  return v;
}

std::string_view AlgorithmVariant::name() const noexcept {
  switch (kind_) {
    case Kind::Averaging: return "averaging";
    case Kind::DecayingAveraging: return "decaying_averaging";
    case Kind::CensoredExchange: return "censored_exchange";
    case Kind::Custom: return "custom";
  }
  return "unknown";
}

bool AlgorithmVariant::samples_estimate() const noexcept {
  if (kind_ == Kind::Custom) return rule_->samples_estimate;
  return kind_ != Kind::CensoredExchange;
}

bool AlgorithmVariant::conserves_mass() const noexcept {
  if (kind_ == Kind::Custom) return rule_->conserves_mass;
  return kind_ == Kind::CensoredExchange;
}

bool AlgorithmVariant::preserves_simplex() const noexcept {
  if (kind_ == Kind::Custom) return rule_->preserves_simplex;
  return true;
}

bool guarantees_simplex(const AlgorithmVariant& variant, const StepSchedule& schedule) {
  switch (variant.kind()) {
    case AlgorithmVariant::Kind::Averaging:
    case AlgorithmVariant::Kind::CensoredExchange: return true;
    case AlgorithmVariant::Kind::DecayingAveraging: return !schedule.uncapped;
    case AlgorithmVariant::Kind::Custom: return variant.preserves_simplex() && !schedule.uncapped;
  }
  return false;
}

double step_size(const AlgorithmVariant& variant, const StepSchedule& schedule, std::size_t t) {
  if (variant.kind() == AlgorithmVariant::Kind::Averaging) return 1.0;
  return eval_schedule(schedule, t);
}

namespace {

constexpr double kCondition1Tolerance = 1e-12;

void resize(SamplingMatrix& p, std::size_t n, std::size_t m) {
  if (p.p.rows() != n || p.p.cols() != m) p.p = Matrix(n, m);
  p.silent.assign(n, 0.0);
}

void resize(EdgeWeights& w, const Graph& g) {
  w.a.assign(g.size(), 0.0);
  w.b.assign(g.size(), 0.0);
  w.w.assign(g.slot_count(), 0.0);
}

void fill_estimate_sampling(const NetworkState& state, const StepSchedule& schedule, SamplingMatrix& out) {
  const std::size_t n = state.nodes(), m = state.opinions();
  resize(out, n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = state.q.row(i);
    auto p = out.p.row(i);
    double sum = 0.0, positive = 0.0;
    bool negative = false;
    for (std::size_t k = 0; k < m; ++k) {
      sum += q[k];
      if (q[k] < -kDefaultTolerances.negativity) negative = true;
      if (q[k] > 0.0) positive += q[k];
    }
    const bool valid = !negative && std::abs(sum - 1.0) <= kDefaultTolerances.sum;
    if (valid) {
      for (std::size_t k = 0; k < m; ++k) p[k] = std::max(q[k], 0.0);
    } else if (schedule.uncapped && positive > 0.0) {
      for (std::size_t k = 0; k < m; ++k) p[k] = std::max(q[k], 0.0) / positive;
    } else {
      throw Error(ErrorCode::InvalidRow, "row " + std::to_string(i) + " of Q(" + std::to_string(state.t) +
                                             ") is not a distribution (sum " + std::to_string(sum) + ")");
    }
  }
}

// Opinions whose estimated mass is below d_max * w * delta are censored;
// their mass becomes the probability of staying silent.
void fill_censored_sampling(const NetworkState& state, const Graph& g, double edge_weight, double delta,
                            SamplingMatrix& out) {
  const std::size_t n = state.nodes(), m = state.opinions();
  resize(out, n, m);
  const double threshold = static_cast<double>(g.max_degree()) * edge_weight * delta;
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = state.q.row(i);
    auto p = out.p.row(i);
    double censored = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (q[k] >= threshold) {
        p[k] = q[k];
      } else {
        p[k] = 0.0;
        censored += std::max(q[k], 0.0);
      }
    }
    out.silent[i] = std::min(censored, 1.0);
  }
}

void fill_sampling(const NetworkState& state, const AlgorithmVariant& variant, const StepSchedule& schedule,
                   const Graph& g, double delta, SamplingMatrix& out) {
  if (state.nodes() != g.size())
    throw Error(ErrorCode::DimensionMismatch, "state has " + std::to_string(state.nodes()) + " rows, graph " +
                                                  std::to_string(g.size()) + " nodes");
  switch (variant.kind()) {
    case AlgorithmVariant::Kind::Averaging:
    case AlgorithmVariant::Kind::DecayingAveraging: fill_estimate_sampling(state, schedule, out); return;
    case AlgorithmVariant::Kind::CensoredExchange:
      fill_censored_sampling(state, g, variant.edge_weight(), delta, out);
      return;
    case AlgorithmVariant::Kind::Custom: out = variant.rule()->sampling(state, g, delta); return;
  }
}

void fill_constant_weights(const Graph& g, EdgeWeights& out) {
  resize(out, g);
  const double w = 1.0 / (static_cast<double>(g.max_degree()) + 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double row = 0.0;
    for (std::size_t k = 0; k < g.degree(i); ++k) {
      out.w[g.slot(i, k)] = w;
      row += w;
    }
    // Accumulated the same way as the row sum so the Condition-1 identity is exact.
    out.a[i] = row;
  }
}

void fill_censored_weights(const Graph& g, double edge_weight, std::span<const Message> y, EdgeWeights& out) {
  resize(out, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (y[i].is_silent()) continue;
    const auto nb = g.neighbors(i);
    double row = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (y[nb[k]].is_silent()) continue;
      out.w[g.slot(i, k)] = edge_weight;
      row += edge_weight;
    }
    out.b[i] = row;
  }
}

void fill_weights(const AlgorithmVariant& variant, const Graph& g, std::span<const Message> y, std::size_t t,
                  EdgeWeights& out) {
  if (y.size() != g.size()) throw Error(ErrorCode::DimensionMismatch, "one message per node required");
  switch (variant.kind()) {
    case AlgorithmVariant::Kind::Averaging:
    case AlgorithmVariant::Kind::DecayingAveraging: fill_constant_weights(g, out); break;
    case AlgorithmVariant::Kind::CensoredExchange: fill_censored_weights(g, variant.edge_weight(), y, out); break;
    case AlgorithmVariant::Kind::Custom: out = variant.rule()->realize(g, y, t); break;
  }
  if (out.a.size() != g.size() || out.b.size() != g.size() || out.w.size() != g.slot_count())
    throw Error(ErrorCode::DimensionMismatch, "realized weights do not match the graph");
  const double residual = condition1_residual(g, out);
  if (!(residual <= kCondition1Tolerance))
    throw Error(ErrorCode::Condition1Violation,
                "round " + std::to_string(t) + ": row identity residual " + std::to_string(residual));
}

}  // namespace

SamplingMatrix sampling_matrix(const NetworkState& state, const AlgorithmVariant& variant,
                               const StepSchedule& schedule, const Graph& g) {
  SamplingMatrix out;
  fill_sampling(state, variant, schedule, g, step_size(variant, schedule, state.t), out);
  return out;
}

EdgeWeights realize_weights(const AlgorithmVariant& variant, const Graph& g, std::span<const Message> y,
                            std::size_t t) {
  EdgeWeights out;
  fill_weights(variant, g, y, t, out);
  return out;
}

EdgeWeights expected_weights(const AlgorithmVariant& variant, const Graph& g, const SamplingMatrix& p,
                             std::size_t t) {
  EdgeWeights out;
  switch (variant.kind()) {
    case AlgorithmVariant::Kind::Averaging:
    case AlgorithmVariant::Kind::DecayingAveraging: fill_constant_weights(g, out); break;
    case AlgorithmVariant::Kind::CensoredExchange: {
      // Messages are drawn independently, so an edge is active with
      // probability (1 - silent_i)(1 - silent_j).
      resize(out, g);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto nb = g.neighbors(i);
        double row = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) {
          const double w = variant.edge_weight() * (1.0 - p.silent[i]) * (1.0 - p.silent[nb[k]]);
          out.w[g.slot(i, k)] = w;
          row += w;
        }
        out.b[i] = row;
      }
      break;
    }
    case AlgorithmVariant::Kind::Custom: out = variant.rule()->expect(g, p, t); break;
  }
  return out;
}

EdgeWeights limiting_weights(const AlgorithmVariant& variant, const Graph& g) {
  EdgeWeights out;
  switch (variant.kind()) {
    case AlgorithmVariant::Kind::Averaging:
    case AlgorithmVariant::Kind::DecayingAveraging: fill_constant_weights(g, out); break;
    case AlgorithmVariant::Kind::CensoredExchange: {
      std::vector<Message> all_active(g.size(), Message::opinion(0));
      fill_censored_weights(g, variant.edge_weight(), all_active, out);
      break;
    }
    case AlgorithmVariant::Kind::Custom: out = variant.rule()->limit(g); break;
  }
  return out;
}

void apply_update_in_place(NetworkState& state, const Graph& g, const EdgeWeights& weights,
                           std::span<const Message> y, double delta, bool check_simplex) {
  const std::size_t n = state.nodes(), m = state.opinions();
  if (n != g.size() || y.size() != n || weights.a.size() != n || weights.b.size() != n ||
      weights.w.size() != g.slot_count())
    throw Error(ErrorCode::DimensionMismatch, "update operands disagree with the graph");
  // Written as Q_i += delta (W Y - A Q_i - B Y_i) so that a consensus atom
  // receives an increment of exactly zero.
  std::vector<double> in(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto q = state.q.row(i);
    std::fill(in.begin(), in.end(), 0.0);
    const auto nb = g.neighbors(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const Message& yj = y[nb[k]];
      if (!yj.is_silent()) in[yj.index()] += weights.w[g.slot(i, k)];
    }
    if (!y[i].is_silent()) in[y[i].index()] -= weights.b[i];
    const double a = weights.a[i];
    for (std::size_t k = 0; k < m; ++k) q[k] += delta * (in[k] - a * q[k]);
    if (check_simplex) {
      double sum = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (q[k] < -kDefaultTolerances.negativity)
          throw Error(ErrorCode::SimplexViolation, "Q_" + std::to_string(i) + "(" + std::to_string(state.t + 1) +
                                                       ") has negative entry " + std::to_string(q[k]));
        sum += q[k];
      }
      if (std::abs(sum - 1.0) > kDefaultTolerances.sum)
        throw Error(ErrorCode::SimplexViolation, "Q_" + std::to_string(i) + "(" + std::to_string(state.t + 1) +
                                                     ") sums to " + std::to_string(sum));
    }
  }
  ++state.t;
}

NetworkState apply_update(const NetworkState& state, const Graph& g, const EdgeWeights& weights,
                          std::span<const Message> y, double delta, bool check_simplex) {
  NetworkState next = state;
  apply_update_in_place(next, g, weights, y, delta, check_simplex);
  return next;
}

void advance(NetworkState& state, const AlgorithmVariant& variant, const StepSchedule& schedule, const Graph& g,
             Rng& rng, Workspace& ws) {
  ws.delta = step_size(variant, schedule, state.t);
  fill_sampling(state, variant, schedule, g, ws.delta, ws.p);
  ws.y.resize(state.nodes(), Message::silent());
  for (std::size_t i = 0; i < state.nodes(); ++i) ws.y[i] = sample_message(ws.p.row(i), ws.p.silent[i], rng);
  fill_weights(variant, g, ws.y, state.t, ws.weights);
  apply_update_in_place(state, g, ws.weights, ws.y, ws.delta, guarantees_simplex(variant, schedule));
}

std::pair<NetworkState, RoundRecord> step(const NetworkState& state, const AlgorithmVariant& variant,
                                          const StepSchedule& schedule, const Graph& g, Rng& rng) {
  NetworkState next = state;
  Workspace ws;
  advance(next, variant, schedule, g, rng, ws);
  RoundRecord record;
  record.t = state.t;
  record.delta = ws.delta;
  record.expected = expected_weights(variant, g, ws.p, state.t);
  record.p = std::move(ws.p);
  record.y = std::move(ws.y);
  record.realized = std::move(ws.weights);
  record.q_before = state.q;
  record.q_after = next.q;
  return {std::move(next), std::move(record)};
}

}  // namespace socsamp
