#include "socsamp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "socsamp/error.hpp"

namespace socsamp {

Matrix message_matrix(std::span<const Message> y, std::size_t opinions) {
  Matrix out(y.size(), opinions);
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!y[i].is_silent()) out(i, y[i].index()) = 1.0;
  return out;
}

namespace {

struct Terms {
  Matrix c;
  Matrix noise;
};

// C(t) and M(t) for one realization; all operands dense.
Terms perturbation_and_noise(const Graph& g, const Matrix& q, const Matrix& p, const Matrix& y,
                             const EdgeWeights& realized, const EdgeWeights& expected) {
  const Matrix a = realized.dense_a(), b = realized.dense_b(), w = realized.dense_w(g);
  const Matrix a_bar = expected.dense_a(), b_bar = expected.dense_b(), w_bar = expected.dense_w(g);
  const Matrix wb = w - b;
  const Matrix wb_bar = w_bar - b_bar;
  Terms out;
  out.c = wb * (p - q) + (wb - wb_bar) * y;
  out.noise = (wb - a - wb_bar + a_bar) * q + wb_bar * (y - p) + (wb_bar - wb) * p;
  return out;
}

// Mean of C(t) given the sampling matrix, using independence of the
// messages across nodes.
Matrix perturbation_mean(const AlgorithmVariant& variant, const Graph& g, const Matrix& q, const SamplingMatrix& p,
                         const EdgeWeights& expected) {
  const std::size_t n = q.rows(), m = q.cols();
  const Matrix wb_bar = expected.dense_w(g) - expected.dense_b();
  Matrix out = wb_bar * (p.p - q);
  if (variant.kind() != AlgorithmVariant::Kind::CensoredExchange) return out;
  // E[(W - B) Y] - (Wbar - Bbar) P, row i:
  //   sum_j w [ (1 - s_i) s_j P_j - (1 - s_j) s_i P_i ].
  const double w = variant.edge_weight();
  for (std::size_t i = 0; i < n; ++i) {
    const double si = p.silent[i];
    for (std::size_t j : g.neighbors(i)) {
      const double sj = p.silent[j];
      for (std::size_t k = 0; k < m; ++k) out(i, k) += w * ((1.0 - si) * sj * p.p(j, k) - (1.0 - sj) * si * p.p(i, k));
    }
  }
  return out;
}

double outcome_count(std::size_t nodes, std::size_t opinions) {
  return std::pow(static_cast<double>(opinions) + 1.0, static_cast<double>(nodes));
}

}  // namespace

StepDecomposition decompose(const RoundRecord& record, const Graph& g, double tolerance) {
  const Matrix& q = record.q_before;
  const std::size_t n = q.rows(), m = q.cols();
  if (n != g.size() || record.y.size() != n || record.p.p.rows() != n || record.p.p.cols() != m ||
      record.q_after.rows() != n || record.q_after.cols() != m)
    throw Error(ErrorCode::DimensionMismatch, "round record does not match the graph");

  const Matrix y = message_matrix(record.y, m);
  StepDecomposition out;
  out.a_bar = record.expected.dense_a();
  out.b_bar = record.expected.dense_b();
  out.w_bar = record.expected.dense_w(g);
  out.hbar = out.w_bar - out.b_bar - out.a_bar;
  Terms terms = perturbation_and_noise(g, q, record.p.p, y, record.realized, record.expected);
  out.c = std::move(terms.c);
  out.noise = std::move(terms.noise);

  const Matrix rebuilt = q + record.delta * (out.hbar * q + out.c + out.noise);
  out.residual = (rebuilt - record.q_after).max_abs();
  if (!(out.residual <= tolerance))
    throw Error(ErrorCode::ReconstructionMismatch,
                "round " + std::to_string(record.t) + ": reconstruction off by " + std::to_string(out.residual));
  return out;
}

ConditionalMeans enumerate_conditional_means(const NetworkState& state, const AlgorithmVariant& variant,
                                             const StepSchedule& schedule, const Graph& g) {
  const std::size_t n = state.nodes(), m = state.opinions();
  if (outcome_count(n, m) > kMaxEnumeratedOutcomes)
    throw Error(ErrorCode::TooLargeToEnumerate,
                "(M+1)^n = " + std::to_string(outcome_count(n, m)) + " joint outcomes");

  const SamplingMatrix p = sampling_matrix(state, variant, schedule, g);
  const EdgeWeights expected = expected_weights(variant, g, p, state.t);

  struct Option {
    Message message;
    double probability;
  };
  std::vector<std::vector<Option>> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (p.silent[i] > 0.0) options[i].push_back({Message::silent(), p.silent[i]});
    for (std::size_t k = 0; k < m; ++k)
      if (p.p(i, k) > 0.0) options[i].push_back({Message::opinion(k), p.p(i, k)});
    if (options[i].empty()) options[i].push_back({Message::silent(), 1.0});
  }

  ConditionalMeans out{Matrix(n, m), Matrix(n, m), 0};
  std::vector<std::size_t> digit(n, 0);
  std::vector<Message> y(n, Message::silent());
  while (true) {
    double probability = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = options[i][digit[i]].message;
      probability *= options[i][digit[i]].probability;
    }
    const EdgeWeights realized = realize_weights(variant, g, y, state.t);
    const Terms terms = perturbation_and_noise(g, state.q, p.p, message_matrix(y, m), realized, expected);
    out.noise += probability * terms.noise;
    out.perturbation += probability * terms.c;
    ++out.outcomes;

    std::size_t i = 0;
    while (i < n && ++digit[i] == options[i].size()) digit[i++] = 0;
    if (i == n) break;
  }
  return out;
}

Matrix conditional_mean_noise(const NetworkState& state, const AlgorithmVariant& variant,
                              const StepSchedule& schedule, const Graph& g) {
  return enumerate_conditional_means(state, variant, schedule, g).noise;
}

Matrix expected_perturbation(const NetworkState& state, const AlgorithmVariant& variant,
                             const StepSchedule& schedule, const Graph& g) {
  if (variant.kind() == AlgorithmVariant::Kind::Custom)
    return enumerate_conditional_means(state, variant, schedule, g).perturbation;
  const SamplingMatrix p = sampling_matrix(state, variant, schedule, g);
  return perturbation_mean(variant, g, state.q, p, expected_weights(variant, g, p, state.t));
}

bool ConditionReport::all_pass() const {
  return mixing.pass && step_sizes.pass && limit.pass && (!perturbation.evaluated || perturbation.pass) &&
         (!mean.applicable || mean.pass);
}

ConditionReport::StepSizes classify_schedule(const StepSchedule& schedule) {
  // Tail behaviour only; the cap affects finitely many terms.
  ConditionReport::StepSizes out;
  out.family = std::string(to_string(schedule.kind));
  switch (schedule.kind) {
    case ScheduleKind::Constant:
      out.divergent_sum = true;
      out.square_summable = false;
      break;
    case ScheduleKind::Harmonic:
      out.divergent_sum = true;
      out.square_summable = true;
      break;
    case ScheduleKind::Square:
      out.divergent_sum = false;
      out.square_summable = true;
      break;
  }
  out.pass = out.divergent_sum && out.square_summable;
  return out;
}

namespace {

constexpr double kIdentityTolerance = 1e-12;
constexpr double kZeroEigenvalue = 1e-9;

Matrix mean_dynamics(const Graph& g, const EdgeWeights& w) { return w.dense_w(g) - w.dense_b() - w.dense_a(); }

}  // namespace

ConditionReport::LimitingDynamics check_limiting_dynamics(const AlgorithmVariant& variant, const Graph& g) {
  ConditionReport::LimitingDynamics out;
  const Matrix h = mean_dynamics(g, limiting_weights(variant, g));
  const std::size_t n = h.rows();

  out.symmetric = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(h(i, j) - h(j, i)) > kIdentityTolerance) out.symmetric = false;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += h(i, j);
    out.ones_residual = std::max(out.ones_residual, std::abs(row));
  }
  if (!out.symmetric) return out;

  const std::vector<double> eig = spectrum(h);
  bool nonzero_negative = true;
  out.largest_nonzero_eigenvalue = -std::numeric_limits<double>::infinity();
  for (double lambda : eig) {
    out.spectral_radius = std::max(out.spectral_radius, std::abs(lambda));
    if (std::abs(lambda) <= kZeroEigenvalue) {
      ++out.zero_eigenvalues;
    } else {
      out.largest_nonzero_eigenvalue = std::max(out.largest_nonzero_eigenvalue, lambda);
      if (lambda >= 0.0) nonzero_negative = false;
    }
  }
  out.simple_zero = out.zero_eigenvalues == 1;
  out.literal_contraction = out.spectral_radius < 1.0;
  out.pass = out.ones_residual <= kIdentityTolerance && nonzero_negative && out.simple_zero;
  return out;
}

ConditionMonitor::ConditionMonitor(AlgorithmVariant variant, StepSchedule schedule, const Graph& g,
                                   Distribution target)
    : variant_(std::move(variant)), schedule_(schedule), graph_(&g), target_(std::move(target)) {
  limit_ = limiting_weights(variant_, g);
  report_.step_sizes = variant_.kind() == AlgorithmVariant::Kind::Averaging
                           ? classify_schedule(StepSchedule::constant(1.0))
                           : classify_schedule(schedule_);
  report_.limit = check_limiting_dynamics(variant_, g);
  report_.mean.applicable = variant_.conserves_mass();
}

void ConditionMonitor::observe_weights(std::size_t t, const EdgeWeights& realized) {
  auto& c1 = report_.mixing;
  const double residual = condition1_residual(*graph_, realized);
  ++c1.rounds;
  c1.max_residual = std::max(c1.max_residual, residual);
  if (!(residual <= kIdentityTolerance) && c1.pass) {
    c1.pass = false;
    c1.failed_round = t;
  }
}

void ConditionMonitor::observe_state(const NetworkState& state) {
  auto& c5 = report_.mean;
  const double drift = mass_drift(state.q, target_);
  if (!c5.worst_round || drift > c5.max_drift) {
    c5.max_drift = drift;
    c5.worst_round = state.t;
  }
  if (c5.applicable) c5.pass = c5.max_drift <= kMassDriftTolerance;
}

void ConditionMonitor::observe_expectations(const NetworkState& state) {
  const Graph& g = *graph_;
  const double delta = step_size(variant_, schedule_, state.t);
  const SamplingMatrix p = sampling_matrix(state, variant_, schedule_, g);
  const EdgeWeights expected = expected_weights(variant_, g, p, state.t);

  // Hbar(t) - Hbar entrywise: off-diagonal through W, diagonal through A + B.
  double deviation = 0.0;
  for (std::size_t s = 0; s < g.slot_count(); ++s)
    deviation = std::max(deviation, std::abs(expected.w[s] - limit_.w[s]));
  for (std::size_t i = 0; i < g.size(); ++i)
    deviation = std::max(deviation, std::abs(expected.a[i] + expected.b[i] - limit_.a[i] - limit_.b[i]));
  auto& c3 = report_.limit;
  c3.max_deviation = std::max(c3.max_deviation, deviation);
  if (!c3.worst_round || deviation / delta > c3.max_deviation_ratio) {
    c3.max_deviation_ratio = deviation / delta;
    c3.worst_round = state.t;
  }

  Matrix mean_c;
  if (variant_.kind() == AlgorithmVariant::Kind::Custom) {
    try {
      mean_c = enumerate_conditional_means(state, variant_, schedule_, g).perturbation;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TooLargeToEnumerate) return;
      throw;
    }
  } else {
    mean_c = perturbation_mean(variant_, g, state.q, p, expected);
  }
  auto& c4 = report_.perturbation;
  const double ratio = mean_c.frobenius() / delta;
  c4.evaluated = true;
  ++c4.rounds;
  if (!std::isfinite(ratio)) {
    if (c4.pass) c4.worst_round = state.t;
    c4.pass = false;
    c4.sup_ratio = std::numeric_limits<double>::infinity();
  } else if (c4.pass && (!c4.worst_round || ratio > c4.sup_ratio)) {
    c4.sup_ratio = ratio;
    c4.worst_round = state.t;
  }
}

ConditionReport check_conditions(std::span<const RoundRecord> records, const AlgorithmVariant& variant,
                                 const StepSchedule& schedule, const Graph& g, const Distribution& target) {
  if (records.empty()) throw Error(ErrorCode::BadParameters, "no rounds to check");
  ConditionMonitor monitor(variant, schedule, g, target);
  monitor.observe_state({records.front().t, records.front().q_before});
  for (const RoundRecord& r : records) {
    const NetworkState before{r.t, r.q_before};
    monitor.observe_weights(r.t, r.realized);
    monitor.observe_expectations(before);
    monitor.observe_state({r.t + 1, r.q_after});
  }
  return monitor.report();
}

double mse_per_node(const Matrix& q, const Distribution& target) {
  if (q.cols() != target.size() || q.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "estimate has " + std::to_string(q.cols()) + " columns, target " +
                                                  std::to_string(target.size()) + " entries");
  double total = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto row = q.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double d = row[k] - target[k];
      total += d * d;
    }
  }
  return total / static_cast<double>(q.rows());
}

double disagreement(const Matrix& q) {
  double worst = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto a = q.row(i);
    for (std::size_t j = i + 1; j < q.rows(); ++j) {
      const auto b = q.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      worst = std::max(worst, s);
    }
  }
  return std::sqrt(worst);
}

std::vector<double> column_mass(const Matrix& q) {
  std::vector<double> mass(q.cols(), 0.0);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto row = q.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) mass[k] += row[k];
  }
  return mass;
}

double mass_drift(const Matrix& q, const Distribution& target) {
  if (q.cols() != target.size()) throw Error(ErrorCode::DimensionMismatch, "target size differs from M");
  const std::vector<double> mass = column_mass(q);
  const double n = static_cast<double>(q.rows());
  double s = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double d = mass[k] - n * target[k];
    s += d * d;
  }
  return std::sqrt(s);
}

std::optional<std::size_t> absorbed_atom(const Matrix& q, double tol) {
  if (q.rows() == 0 || q.cols() == 0) return std::nullopt;
  const auto first = q.row(0);
  const std::size_t atom =
      static_cast<std::size_t>(std::max_element(first.begin(), first.end()) - first.begin());
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto row = q.row(i);
    for (std::size_t k = 0; k < row.size(); ++k)
      if (std::abs(row[k] - (k == atom ? 1.0 : 0.0)) > tol) return std::nullopt;
  }
  return atom;
}

std::optional<std::size_t> time_to_threshold(std::span<const std::size_t> t, std::span<const double> values,
                                             double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::BadParameters, "threshold must be positive");
  if (t.size() != values.size()) throw Error(ErrorCode::DimensionMismatch, "trace lengths differ");
  for (std::size_t k = 0; k < t.size(); ++k)
    if (values[k] <= tau) return t[k];
  return std::nullopt;
}

double rate_fit(std::span<const std::size_t> t, std::span<const double> mse, std::size_t lo, std::size_t hi) {
  if (t.size() != mse.size()) throw Error(ErrorCode::DimensionMismatch, "trace lengths differ");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < lo || t[k] > hi || t[k] == 0) continue;
    if (!(mse[k] > 0.0))
      throw Error(ErrorCode::DegenerateWindow, "non-positive mse at t = " + std::to_string(t[k]));
    const double x = std::log(static_cast<double>(t[k]));
    const double y = std::log(mse[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw Error(ErrorCode::DegenerateWindow, "fewer than two points in the window");
  const double c = static_cast<double>(count);
  const double var = sxx - sx * sx / c;
  if (!(var > 0.0)) throw Error(ErrorCode::DegenerateWindow, "window has a single distinct t");
  return (sxy - sx * sy / c) / var;
}

}  // namespace socsamp
