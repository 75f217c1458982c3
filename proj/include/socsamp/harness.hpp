#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socsamp/analysis.hpp"
#include "socsamp/config.hpp"

namespace socsamp {

/// Independent streams for one trial, split from the base seed by counter.
struct TrialSeeds {
  std::uint64_t graph = 0;
  std::uint64_t opinions = 0;
  std::uint64_t protocol = 0;

  bool operator==(const TrialSeeds&) const = default;
};

/// Graph and opinion seeds stay at index 0 when resampling is off, so every
/// trial then shares one network and one set of initial values.
TrialSeeds trial_seeds(const ExperimentConfig& config, std::size_t trial);

struct TrialSetup {
  Graph graph;
  OpinionSample opinions;
  Distribution target;
  NetworkState initial;
  TrialSeeds seeds;
};

TrialSetup prepare_trial(const ExperimentConfig& config, std::size_t trial);

/// Estimates of one node on the recording grid.
struct NodeTrace {
  std::size_t node = 0;
  std::vector<std::vector<double>> rows;

  bool operator==(const NodeTrace&) const = default;
};

struct TrialResult {
  std::size_t index = 0;
  TraceMetrics metrics;
  ConditionReport conditions;
  /// First round with mse <= threshold, checked every round.
  std::optional<std::size_t> time_to_threshold;
  TrialSeeds seeds;
  std::vector<double> target;
  std::vector<NodeTrace> traces;
  Matrix final_q;
};

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial);

struct EnsembleOptions {
  std::size_t threads = 1;
};

struct EnsembleResult {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<std::size_t> t;
  std::vector<double> mse_mean;
  std::vector<double> mse_stderr;
  std::vector<double> disagreement_mean;
  std::vector<double> mass_drift_max;
  /// Slope of log mean mse against log t over the configured window.
  std::optional<double> rate_slope;
  std::vector<TrialResult> trials;
};

/// Trials run on a bounded pool and are reduced in index order, so the
/// thread count never changes the result. A failing trial aborts the run
/// with its index in the message.
EnsembleResult run_ensemble(const ExperimentConfig& config, const EnsembleOptions& options = {});

/// One ensemble per axis value; every point shares the base seed.
std::vector<EnsembleResult> sweep(const ExperimentConfig& config, const EnsembleOptions& options = {});

/// Quantile (linear interpolation) of per-trial times; trials that never
/// reach the threshold count as infinite and an infinite quantile is empty.
std::optional<double> time_quantile(const EnsembleResult& result, double p);

std::string results_csv(const EnsembleResult& result);
std::string trial_csv(const TrialResult& trial);
/// `t` is the recording grid the rows were taken on.
std::string trace_csv(const NodeTrace& trace, std::span<const std::size_t> t);
std::string summary_json(const EnsembleResult& result);

/// results.csv and summary.json; with per_trial also trials/trial_NNNN.csv
/// and trials/trial_NNNN_node_K.csv. Throws IoFailure.
void emit_results(const EnsembleResult& result, const std::filesystem::path& dir, bool per_trial = false);

/// Config recovered from a summary.json document.
ExperimentConfig config_from_summary(const std::string& json_text);

const char* version();

}  // namespace socsamp
