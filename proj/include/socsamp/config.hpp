#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "socsamp/protocol.hpp"
#include "socsamp/rng.hpp"
#include "socsamp/simplex.hpp"
#include "socsamp/topology.hpp"

namespace socsamp {

/// Law the initial opinions are drawn from.
struct InitialLaw {
  enum class Kind { Explicit, UniformSupport, Skewed };

  Kind kind = Kind::UniformSupport;
  /// Explicit weights, one per opinion.
  std::vector<double> weights;
  /// Uniform on a random subset of this many opinions; 0 means all M.
  std::size_t support = 0;

  bool operator==(const InitialLaw&) const = default;
};

/// (0.38, 0.38, 0.24/(M-2), ..., 0.24/(M-2)); needs M >= 3.
Distribution skewed_law(std::size_t opinions);

/// The concrete distribution for a trial. Uniform-support laws draw their
/// support from `rng`; the other kinds do not touch it.
Distribution resolve_law(const InitialLaw& law, std::size_t opinions, Rng& rng);

enum class StrideKind { Logarithmic, Linear };

/// Rounds at which metrics are recorded: 0, ceil(factor^k) ..., horizon
/// (logarithmic) or every `every` rounds plus the horizon (linear).
struct RecordStride {
  StrideKind kind = StrideKind::Logarithmic;
  double factor = 1.2;
  std::size_t every = 100;

  bool operator==(const RecordStride&) const = default;
};

std::vector<std::size_t> recording_rounds(const RecordStride& stride, std::size_t horizon);

struct VariantConfig {
  AlgorithmVariant::Kind kind = AlgorithmVariant::Kind::CensoredExchange;
  double edge_weight = 1.0;

  bool operator==(const VariantConfig&) const = default;
};

AlgorithmVariant make_variant(const VariantConfig& config);

enum class SweepAxisKind { None, Schedule, Topology, Opinions, Support, Skew };

struct SweepAxis {
  SweepAxisKind kind = SweepAxisKind::None;
  std::vector<std::string> values;

  bool operator==(const SweepAxis&) const = default;
};

struct ExperimentConfig {
  TopologySpec topology{Grid{5, 5}};
  bool resample_graph = true;
  std::size_t opinions = 5;
  InitialLaw initial;
  bool resample_opinions = true;
  VariantConfig variant;
  StepSchedule schedule;
  std::size_t horizon = 10000;
  std::size_t trials = 1;
  std::uint64_t base_seed = 1;
  RecordStride stride;
  double threshold = 1e-2;
  std::size_t rate_lo = 100;
  std::size_t rate_hi = 10000;
  std::vector<std::size_t> trace_nodes;
  std::string label;
  SweepAxis sweep;

  bool operator==(const ExperimentConfig&) const = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Canonical flat key/value form; every field is present.
KeyValues to_key_values(const ExperimentConfig& config);
/// Unknown keys, malformed values and invalid combinations throw ConfigError
/// naming the offending field. Missing keys keep their defaults.
ExperimentConfig from_key_values(const KeyValues& kv);

/// "key = value" lines; '#' starts a comment.
std::string to_text(const ExperimentConfig& config);
/// Errors carry "<source>:<line>: field '<key>': ...".
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// FNV-1a of the canonical text, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Throws ConfigError if the configuration cannot be run.
void validate(const ExperimentConfig& config);

/// "harmonic:10", "constant:0.05", "square:1".
StepSchedule parse_schedule(const std::string& text, StepSchedule base = {});
std::string schedule_label(const StepSchedule& schedule);

/// One configuration per axis value, each labelled "<axis>=<value>".
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config);

}  // namespace socsamp
