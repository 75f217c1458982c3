#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socsamp/matrix.hpp"
#include "socsamp/protocol.hpp"
#include "socsamp/simplex.hpp"
#include "socsamp/topology.hpp"

namespace socsamp {

/**
 * One realized round written as a stochastic-approximation step:
 *
 *   Q(t+1) = Q(t) + delta(t) [ Hbar(t) Q(t) + C(t) + M(t) ]
 *
 * with Hbar(t) = Wbar - Bbar - Abar the mean dynamics, C(t) the perturbation
 * caused by sampling from P(t) instead of Q(t) and by message-dependent
 * weights, and M(t) a martingale difference.
 */
struct StepDecomposition {
  Matrix hbar;
  Matrix c;
  Matrix noise;
  Matrix a_bar;
  Matrix b_bar;
  Matrix w_bar;
  /// Largest entrywise gap between the reconstruction and Q(t+1).
  double residual = 0.0;
};

/// Throws ReconstructionMismatch when the three terms do not rebuild the
/// realized step to within `tolerance` per entry.
StepDecomposition decompose(const RoundRecord& record, const Graph& g, double tolerance = 1e-12);

/// Rows are e_{Y_i} or zero.
Matrix message_matrix(std::span<const Message> y, std::size_t opinions);

struct ConditionalMeans {
  Matrix noise;         ///< E[M(t) | history]
  Matrix perturbation;  ///< E[C(t) | history]
  std::size_t outcomes = 0;
};

inline constexpr double kMaxEnumeratedOutcomes = 1e6;

/// Exact conditional means by summing over every joint message outcome of
/// one round from `state`. Throws TooLargeToEnumerate if (M+1)^n > 10^6.
ConditionalMeans enumerate_conditional_means(const NetworkState& state, const AlgorithmVariant& variant,
                                             const StepSchedule& schedule, const Graph& g);

Matrix conditional_mean_noise(const NetworkState& state, const AlgorithmVariant& variant,
                              const StepSchedule& schedule, const Graph& g);

/// E[C(t) | history] in closed form for the built-in variants (messages are
/// independent across nodes); custom rules fall back to enumeration.
Matrix expected_perturbation(const NetworkState& state, const AlgorithmVariant& variant,
                             const StepSchedule& schedule, const Graph& g);

struct ConditionReport {
  struct Mixing {
    bool pass = true;
    double max_residual = 0.0;
    std::optional<std::size_t> failed_round;
    std::size_t rounds = 0;
  };
  struct StepSizes {
    bool pass = false;
    bool divergent_sum = false;
    bool square_summable = false;
    std::string family;
  };
  struct LimitingDynamics {
    bool pass = false;
    bool symmetric = false;
    double ones_residual = 0.0;
    std::size_t zero_eigenvalues = 0;
    bool simple_zero = false;
    double largest_nonzero_eigenvalue = 0.0;
    double spectral_radius = 0.0;
    /// The stricter reading: every eigenvalue has modulus below one.
    bool literal_contraction = false;
    /// sup over observed rounds of max |Hbar(t) - Hbar| and of that over delta(t).
    double max_deviation = 0.0;
    double max_deviation_ratio = 0.0;
    std::optional<std::size_t> worst_round;
  };
  struct Perturbation {
    bool evaluated = false;
    bool pass = true;
    double sup_ratio = 0.0;
    std::optional<std::size_t> worst_round;
    std::size_t rounds = 0;
  };
  struct MeanPreservation {
    bool applicable = false;
    bool pass = true;
    double max_drift = 0.0;
    std::optional<std::size_t> worst_round;
  };

  Mixing mixing;
  StepSizes step_sizes;
  LimitingDynamics limit;
  Perturbation perturbation;
  MeanPreservation mean;

  /// Conditions that apply to this configuration all hold.
  bool all_pass() const;
};

inline constexpr double kMassDriftTolerance = 1e-10;

ConditionReport::StepSizes classify_schedule(const StepSchedule& schedule);
ConditionReport::LimitingDynamics check_limiting_dynamics(const AlgorithmVariant& variant, const Graph& g);

/// Accumulates condition measurements round by round so long trials never
/// need to keep their records.
class ConditionMonitor {
 public:
  ConditionMonitor(AlgorithmVariant variant, StepSchedule schedule, const Graph& g, Distribution target);

  void observe_weights(std::size_t t, const EdgeWeights& realized);
  void observe_state(const NetworkState& state);
  /// Conditions 3 (time-varying part) and 4 at this state; costs O(|E| M).
  void observe_expectations(const NetworkState& state);

  ConditionReport report() const { return report_; }

 private:
  AlgorithmVariant variant_;
  StepSchedule schedule_;
  const Graph* graph_;
  Distribution target_;
  EdgeWeights limit_;
  ConditionReport report_;
};

ConditionReport check_conditions(std::span<const RoundRecord> records, const AlgorithmVariant& variant,
                                 const StepSchedule& schedule, const Graph& g, const Distribution& target);

/// (1/n) sum_i ||Q_i - target||^2. Throws DimensionMismatch.
double mse_per_node(const Matrix& q, const Distribution& target);
/// max_{i,j} ||Q_i - Q_j||.
double disagreement(const Matrix& q);
std::vector<double> column_mass(const Matrix& q);
/// ||1^T Q - n target||.
double mass_drift(const Matrix& q, const Distribution& target);
/// Index of the elementary vector every row is within `tol` of, if any.
std::optional<std::size_t> absorbed_atom(const Matrix& q, double tol = 1e-9);

/// Per-round metrics of a trial, sampled on the recording grid.
struct TraceMetrics {
  std::vector<std::size_t> t;
  std::vector<double> mse;
  std::vector<double> disagreement;
  std::vector<double> mass_drift;

  bool operator==(const TraceMetrics&) const = default;
};

/// First t with value <= tau.
std::optional<std::size_t> time_to_threshold(std::span<const std::size_t> t, std::span<const double> values,
                                             double tau);

/// Least-squares slope of log(mse) against log(t) over lo <= t <= hi.
/// Throws DegenerateWindow with fewer than two usable points or a
/// non-positive mse inside the window.
double rate_fit(std::span<const std::size_t> t, std::span<const double> mse, std::size_t lo, std::size_t hi);

}  // namespace socsamp
