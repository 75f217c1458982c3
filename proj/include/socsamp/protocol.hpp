#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "socsamp/matrix.hpp"
#include "socsamp/rng.hpp"
#include "socsamp/simplex.hpp"
#include "socsamp/topology.hpp"

namespace socsamp {

/// Round index t and the n x M estimate matrix Q(t); row i is node i's estimate.
struct NetworkState {
  std::size_t t = 0;
  Matrix q;

  std::size_t nodes() const noexcept { return q.rows(); }
  std::size_t opinions() const noexcept { return q.cols(); }

  bool operator==(const NetworkState&) const = default;
};

/// Q_i(0) = e_{X_i}.
NetworkState init_state(const OpinionSample& sample);

enum class ScheduleKind { Constant, Harmonic, Square };

/// delta(t) = c, c/(t+1) or c/(t+1)^2, clipped at `cap` unless `uncapped`.
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::Harmonic;
  double c = 1.0;
  double cap = 1.0;
  /// Replicates the nominal constants with no clipping. Rows of Q that leave
  /// the simplex are then projected back before being used for sampling.
  bool uncapped = false;

  static StepSchedule constant(double c) { return {ScheduleKind::Constant, c}; }
  static StepSchedule harmonic(double c) { return {ScheduleKind::Harmonic, c}; }
  static StepSchedule square(double c) { return {ScheduleKind::Square, c}; }

  bool operator==(const StepSchedule&) const = default;
};

double eval_schedule(const StepSchedule& schedule, std::size_t t);
/// Throws BadParameters unless c > 0 and cap lies in (0, 1].
void validate(const StepSchedule& schedule);

std::string_view to_string(ScheduleKind kind);

/// Per-node probabilities of each opinion plus the silent remainder.
struct SamplingMatrix {
  Matrix p;
  std::vector<double> silent;

  std::size_t nodes() const noexcept { return p.rows(); }
  std::span<const double> row(std::size_t i) const { return p.row(i); }
  SubDistribution sub_distribution(std::size_t i) const;
};

/**
 * The diagonal matrices A(t), B(t) and the neighbor weights W(t).
 *
 * `w` is laid out along the graph's CSR slots: w[g.slot(i, k)] is W_ij for
 * the k-th neighbor j of i. Used both for realized and expected weights.
 */
struct EdgeWeights {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> w;

  Matrix dense_w(const Graph& g) const;
  Matrix dense_a() const { return Matrix::diagonal(a); }
  Matrix dense_b() const { return Matrix::diagonal(b); }
};

/// max_i |sum_j W_ij - A_ii - B_ii|.
double condition1_residual(const Graph& g, const EdgeWeights& weights);

/// User-supplied instance of the general linear update.
struct CustomRule {
  std::function<SamplingMatrix(const NetworkState&, const Graph&, double delta)> sampling;
  std::function<EdgeWeights(const Graph&, std::span<const Message>, std::size_t t)> realize;
  /// E[A(t)], E[B(t)], E[W(t)] given the sampling matrix.
  std::function<EdgeWeights(const Graph&, const SamplingMatrix&, std::size_t t)> expect;
  /// Time-invariant weights whose H = W - B - A the dynamics settle to.
  std::function<EdgeWeights(const Graph&)> limit;
  bool preserves_simplex = false;
  bool conserves_mass = false;
  bool samples_estimate = false;
};

class AlgorithmVariant {
 public:
  enum class Kind { Averaging, DecayingAveraging, CensoredExchange, Custom };

  /// delta = 1, A_ii = d_i/(d_max+1), B = 0, W_ij = 1/(d_max+1), P = Q.
  static AlgorithmVariant averaging() { return AlgorithmVariant(Kind::Averaging); }
  /// Same weights as averaging, with the schedule's delta(t).
  static AlgorithmVariant decaying_averaging() { return AlgorithmVariant(Kind::DecayingAveraging); }
  /// Threshold-censored sampling and pairwise mass exchange with base weight w.
  static AlgorithmVariant censored_exchange(double edge_weight = 1.0);
  static AlgorithmVariant custom(CustomRule rule);

  Kind kind() const noexcept { return kind_; }
  double edge_weight() const noexcept { return edge_weight_; }
  const CustomRule* rule() const noexcept { return rule_.get(); }

  std::string_view name() const noexcept;
  /// Sampling distribution equals the estimate (P(t) = Q(t)).
  bool samples_estimate() const noexcept;
  bool conserves_mass() const noexcept;
  /// Whether every row stays on the simplex for a capped schedule.
  bool preserves_simplex() const noexcept;

 private:
  explicit AlgorithmVariant(Kind kind) : kind_(kind) {}

  Kind kind_;
  double edge_weight_ = 1.0;
  std::shared_ptr<const CustomRule> rule_;
};

/// Everything one synchronous round produced.
struct RoundRecord {
  std::size_t t = 0;
  double delta = 0.0;
  SamplingMatrix p;
  std::vector<Message> y;
  EdgeWeights realized;
  EdgeWeights expected;
  Matrix q_before;
  Matrix q_after;
};

/// delta(t) applied by `variant` (averaging always uses 1).
double step_size(const AlgorithmVariant& variant, const StepSchedule& schedule, std::size_t t);

/// Throws InvalidRow when P = Q and a row of Q is not a distribution
/// (in uncapped mode such rows are projected onto the simplex instead).
SamplingMatrix sampling_matrix(const NetworkState& state, const AlgorithmVariant& variant,
                               const StepSchedule& schedule, const Graph& g);

/// Throws Condition1Violation when the realized weights break the row identity.
EdgeWeights realize_weights(const AlgorithmVariant& variant, const Graph& g, std::span<const Message> y,
                            std::size_t t);

EdgeWeights expected_weights(const AlgorithmVariant& variant, const Graph& g, const SamplingMatrix& p,
                             std::size_t t);

EdgeWeights limiting_weights(const AlgorithmVariant& variant, const Graph& g);

/// Q_i(t+1) = (1 - delta A_ii) Q_i - delta B_ii Y_i + sum_j delta W_ij Y_j.
/// With check_simplex, throws SimplexViolation if a row leaves the simplex.
NetworkState apply_update(const NetworkState& state, const Graph& g, const EdgeWeights& weights,
                          std::span<const Message> y, double delta, bool check_simplex = false);
void apply_update_in_place(NetworkState& state, const Graph& g, const EdgeWeights& weights,
                           std::span<const Message> y, double delta, bool check_simplex = false);

/// One full round; the record captures every intermediate.
std::pair<NetworkState, RoundRecord> step(const NetworkState& state, const AlgorithmVariant& variant,
                                          const StepSchedule& schedule, const Graph& g, Rng& rng);

/// Scratch space reused across rounds by `advance`.
struct Workspace {
  SamplingMatrix p;
  std::vector<Message> y;
  EdgeWeights weights;
  double delta = 0.0;
};

/// Same round as `step` but in place and without copying the record.
/// The round's sampling matrix, messages and weights are left in `ws`.
void advance(NetworkState& state, const AlgorithmVariant& variant, const StepSchedule& schedule, const Graph& g,
             Rng& rng, Workspace& ws);

/// Whether apply_update should enforce the simplex for this configuration.
bool guarantees_simplex(const AlgorithmVariant& variant, const StepSchedule& schedule);

/// One trajectory checkpoint: t, Q(t) and the stream position before round t.
struct Checkpoint {
  std::size_t t = 0;
  Matrix q;
  RngPosition rng;

  bool operator==(const Checkpoint&) const = default;
};

/// Header line "socsamp-trajectory 1 n M", then one line per checkpoint:
/// "t seed draws q_00 q_01 ..." with Q row-major in shortest round-trip decimal.
void write_trajectory_header(std::ostream& out, std::size_t nodes, std::size_t opinions);
void write_checkpoint(std::ostream& out, const NetworkState& state, const Rng& rng);
std::vector<Checkpoint> read_trajectory(std::istream& in);

}  // namespace socsamp
