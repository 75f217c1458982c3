#include "socsamp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "socsamp/error.hpp"
#include "socsamp/format.hpp"

#ifndef SOCSAMP_VERSION
#define SOCSAMP_VERSION "0.0.0"
#endif

namespace socsamp {

namespace {

constexpr std::uint64_t kGraphStream = 0;
constexpr std::uint64_t kOpinionStream = 1;
constexpr std::uint64_t kProtocolStream = 2;

}  // namespace

const char* version() { return SOCSAMP_VERSION; }

TrialSeeds trial_seeds(const ExperimentConfig& config, std::size_t trial) {
  TrialSeeds s;
  s.graph = derive_seed(config.base_seed, kGraphStream, config.resample_graph ? trial : 0);
  s.opinions = derive_seed(config.base_seed, kOpinionStream, config.resample_opinions ? trial : 0);
  s.protocol = derive_seed(config.base_seed, kProtocolStream, trial);
  return s;
}

TrialSetup prepare_trial(const ExperimentConfig& config, std::size_t trial) {
  const TrialSeeds seeds = trial_seeds(config, trial);
  Rng graph_rng(seeds.graph);
  Graph graph = generate(config.topology, graph_rng);
  Rng opinion_rng(seeds.opinions);
  const Distribution law = resolve_law(config.initial, config.opinions, opinion_rng);
  OpinionSample opinions = draw_opinions(law, graph.size(), opinion_rng);
  Distribution target = empirical_histogram(opinions);
  NetworkState initial = init_state(opinions);
  return TrialSetup{std::move(graph), std::move(opinions), std::move(target), std::move(initial), seeds};
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial) {
  TrialSetup setup = prepare_trial(config, trial);
  const Graph& g = setup.graph;
  const AlgorithmVariant variant = make_variant(config.variant);
  const std::vector<std::size_t> rounds = recording_rounds(config.stride, config.horizon);

  TrialResult result;
  result.index = trial;
  result.seeds = setup.seeds;
  result.target.assign(setup.target.weights().begin(), setup.target.weights().end());
  for (std::size_t node : config.trace_nodes) result.traces.push_back({node, {}});

  ConditionMonitor monitor(variant, config.schedule, g, setup.target);
  NetworkState state = std::move(setup.initial);
  Rng rng(setup.seeds.protocol);
  Workspace ws;
  std::size_t next = 0;

  for (;;) {
    const std::size_t t = state.t;
    monitor.observe_state(state);
    const double mse = mse_per_node(state.q, setup.target);
    if (!result.time_to_threshold && mse <= config.threshold) result.time_to_threshold = t;
    if (next < rounds.size() && rounds[next] == t) {
      result.metrics.t.push_back(t);
      result.metrics.mse.push_back(mse);
      result.metrics.disagreement.push_back(disagreement(state.q));
      result.metrics.mass_drift.push_back(mass_drift(state.q, setup.target));
      for (auto& trace : result.traces) {
        const auto row = state.q.row(trace.node);
        trace.rows.emplace_back(row.begin(), row.end());
      }
      monitor.observe_expectations(state);
      ++next;
    }
    if (t >= config.horizon) break;
    advance(state, variant, config.schedule, g, rng, ws);
    monitor.observe_weights(t, ws.weights);
  }

  result.conditions = monitor.report();
  result.final_q = std::move(state.q);
  return result;
}

EnsembleResult run_ensemble(const ExperimentConfig& config, const EnsembleOptions& options) {
  validate(config);
  const std::size_t k = config.trials;
  std::vector<std::optional<TrialResult>> slots(k);
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::mutex error_lock;
  std::optional<std::size_t> failed_trial;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = cursor.fetch_add(1);
      if (i >= k) return;
      try {
        slots[i] = run_trial(config, i);
      } catch (...) {
        std::lock_guard lock(error_lock);
        if (!failed_trial || i < *failed_trial) {
          failed_trial = i;
          failure = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, k);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (failure) {
    const std::string where = "trial " + std::to_string(*failed_trial) + ": ";
    try {
      std::rethrow_exception(failure);
    } catch (const Error& e) {
      throw Error(e.code(), where + e.detail());
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
  }

  EnsembleResult out;
  out.config = config;
  out.config_hash = config_hash(config);
  for (auto& slot : slots) out.trials.push_back(std::move(*slot));

  out.t = out.trials.front().metrics.t;
  const std::size_t points = out.t.size();
  out.mse_mean.assign(points, 0.0);
  out.mse_stderr.assign(points, 0.0);
  out.disagreement_mean.assign(points, 0.0);
  out.mass_drift_max.assign(points, 0.0);
  for (const auto& trial : out.trials) {
    if (trial.metrics.t != out.t) throw Error(ErrorCode::DimensionMismatch, "trials recorded different rounds");
    for (std::size_t r = 0; r < points; ++r) {
      out.mse_mean[r] += trial.metrics.mse[r];
      out.disagreement_mean[r] += trial.metrics.disagreement[r];
      out.mass_drift_max[r] = std::max(out.mass_drift_max[r], trial.metrics.mass_drift[r]);
    }
  }
  const double kd = static_cast<double>(k);
  for (std::size_t r = 0; r < points; ++r) {
    out.mse_mean[r] /= kd;
    out.disagreement_mean[r] /= kd;
    if (k > 1) {
      double ss = 0.0;
      for (const auto& trial : out.trials) {
        const double d = trial.metrics.mse[r] - out.mse_mean[r];
        ss += d * d;
      }
      out.mse_stderr[r] = std::sqrt(ss / (kd - 1.0) / kd);
    }
  }

  try {
    out.rate_slope = rate_fit(out.t, out.mse_mean, config.rate_lo, config.rate_hi);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateWindow) throw;
  }
  return out;
}

std::vector<EnsembleResult> sweep(const ExperimentConfig& config, const EnsembleOptions& options) {
  if (config.sweep.kind == SweepAxisKind::None || config.sweep.values.empty())
    throw Error(ErrorCode::ConfigError, "field 'sweep.axis': a sweep needs an axis and at least one value");
  validate(config);
  std::vector<EnsembleResult> out;
  for (const auto& point : expand_sweep(config)) out.push_back(run_ensemble(point, options));
  return out;
}

std::optional<double> time_quantile(const EnsembleResult& result, double p) {
  if (result.trials.empty()) return std::nullopt;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> times;
  for (const auto& trial : result.trials)
    times.push_back(trial.time_to_threshold ? static_cast<double>(*trial.time_to_threshold) : inf);
  std::sort(times.begin(), times.end());
  const double h = (static_cast<double>(times.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  if (std::isinf(times[hi])) return std::nullopt;
  return times[lo] + (h - static_cast<double>(lo)) * (times[hi] - times[lo]);
}

std::string results_csv(const EnsembleResult& result) {
  std::string out = "t,mse_mean,mse_stderr,disagreement_mean,mass_drift_max\n";
  for (std::size_t r = 0; r < result.t.size(); ++r) {
    out += std::to_string(result.t[r]) + ',' + format_double(result.mse_mean[r]) + ',' +
           format_double(result.mse_stderr[r]) + ',' + format_double(result.disagreement_mean[r]) + ',' +
           format_double(result.mass_drift_max[r]) + '\n';
  }
  return out;
}

std::string trial_csv(const TrialResult& trial) {
  std::string out = "t,mse,disagreement,mass_drift\n";
  const auto& m = trial.metrics;
  for (std::size_t r = 0; r < m.t.size(); ++r)
    out += std::to_string(m.t[r]) + ',' + format_double(m.mse[r]) + ',' + format_double(m.disagreement[r]) + ',' +
           format_double(m.mass_drift[r]) + '\n';
  return out;
}

std::string trace_csv(const NodeTrace& trace, std::span<const std::size_t> t) {
  std::string out = "t";
  const std::size_t width = trace.rows.empty() ? 0 : trace.rows.front().size();
  for (std::size_t m = 0; m < width; ++m) out += ",q" + std::to_string(m);
  out += '\n';
  for (std::size_t r = 0; r < trace.rows.size(); ++r) {
    out += std::to_string(t[r]);
    for (double v : trace.rows[r]) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

namespace {

using Json = nlohmann::ordered_json;

Json optional_json(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }
Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json report_json(const ConditionReport& r) {
  Json j;
  j["all_pass"] = r.all_pass();
  j["mixing"] = {{"pass", r.mixing.pass},
                 {"max_residual", r.mixing.max_residual},
                 {"failed_round", optional_json(r.mixing.failed_round)},
                 {"rounds", r.mixing.rounds}};
  j["step_sizes"] = {{"pass", r.step_sizes.pass},
                     {"family", r.step_sizes.family},
                     {"divergent_sum", r.step_sizes.divergent_sum},
                     {"square_summable", r.step_sizes.square_summable}};
  const auto& l = r.limit;
  j["limiting_dynamics"] = {{"pass", l.pass},
                            {"symmetric", l.symmetric},
                            {"ones_residual", l.ones_residual},
                            {"zero_eigenvalues", l.zero_eigenvalues},
                            {"simple_zero", l.simple_zero},
                            {"largest_nonzero_eigenvalue", l.largest_nonzero_eigenvalue},
                            {"spectral_radius", l.spectral_radius},
                            {"literal_contraction", l.literal_contraction},
                            {"max_deviation", l.max_deviation},
                            {"max_deviation_ratio", l.max_deviation_ratio},
                            {"worst_round", optional_json(l.worst_round)}};
  j["perturbation"] = {{"evaluated", r.perturbation.evaluated},
                       {"pass", r.perturbation.pass},
                       {"sup_ratio", r.perturbation.sup_ratio},
                       {"worst_round", optional_json(r.perturbation.worst_round)},
                       {"rounds", r.perturbation.rounds}};
  j["mean_preservation"] = {{"applicable", r.mean.applicable},
                            {"pass", r.mean.pass},
                            {"max_drift", r.mean.max_drift},
                            {"worst_round", optional_json(r.mean.worst_round)}};
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

std::string trial_stem(std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "trial_" + digits;
}

}  // namespace

std::string summary_json(const EnsembleResult& result) {
  Json j;
  j["version"] = version();
  j["config_hash"] = result.config_hash;
  Json config = Json::object();
  for (const auto& [key, value] : to_key_values(result.config)) config[key] = value;
  j["config"] = std::move(config);
  j["trials"] = result.trials.size();
  j["recorded_rounds"] = result.t.size();

  if (!result.t.empty()) {
    j["final"] = {{"t", result.t.back()},
                  {"mse_mean", result.mse_mean.back()},
                  {"mse_stderr", result.mse_stderr.back()},
                  {"disagreement_mean", result.disagreement_mean.back()},
                  {"mass_drift_max", result.mass_drift_max.back()}};
  }

  std::size_t reached = 0;
  for (const auto& trial : result.trials) reached += trial.time_to_threshold ? 1 : 0;
  Json ttt;
  ttt["threshold"] = result.config.threshold;
  ttt["reached"] = reached;
  ttt["min"] = optional_json(time_quantile(result, 0.0));
  ttt["q25"] = optional_json(time_quantile(result, 0.25));
  ttt["median"] = optional_json(time_quantile(result, 0.5));
  ttt["q75"] = optional_json(time_quantile(result, 0.75));
  ttt["max"] = optional_json(time_quantile(result, 1.0));
  j["time_to_threshold"] = std::move(ttt);

  j["rate_fit"] = {{"lo", result.config.rate_lo},
                   {"hi", result.config.rate_hi},
                   {"slope", optional_json(result.rate_slope)}};

  std::size_t passing = 0;
  for (const auto& trial : result.trials) passing += trial.conditions.all_pass() ? 1 : 0;
  j["conditions_all_pass"] = passing == result.trials.size();

  Json per_trial = Json::array();
  for (const auto& trial : result.trials) {
    Json t;
    t["index"] = trial.index;
    t["seeds"] = {{"graph", trial.seeds.graph}, {"opinions", trial.seeds.opinions}, {"protocol", trial.seeds.protocol}};
    t["target"] = trial.target;
    t["time_to_threshold"] = optional_json(trial.time_to_threshold);
    t["final_mse"] = trial.metrics.mse.empty() ? Json(nullptr) : Json(trial.metrics.mse.back());
    t["conditions"] = report_json(trial.conditions);
    per_trial.push_back(std::move(t));
  }
  j["per_trial"] = std::move(per_trial);
  return j.dump(2) + "\n";
}

void emit_results(const EnsembleResult& result, const std::filesystem::path& dir, bool per_trial) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "results.csv", results_csv(result));
  write_file(dir / "summary.json", summary_json(result));
  if (!per_trial) return;
  const auto trials_dir = dir / "trials";
  std::filesystem::create_directories(trials_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + trials_dir.string() + ": " + ec.message());
  for (const auto& trial : result.trials) {
    const std::string stem = trial_stem(trial.index);
    write_file(trials_dir / (stem + ".csv"), trial_csv(trial));
    for (const auto& trace : trial.traces)
      write_file(trials_dir / (stem + "_node_" + std::to_string(trace.node) + ".csv"),
                 trace_csv(trace, trial.metrics.t));
  }
}

ExperimentConfig config_from_summary(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("summary is not valid JSON: ") + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object())
    throw Error(ErrorCode::FormatError, "summary has no config object");
  KeyValues kv;
  for (const auto& [key, value] : j["config"].items()) {
    if (!value.is_string()) throw Error(ErrorCode::FormatError, "config value for '" + key + "' is not a string");
    kv.emplace_back(key, value.get<std::string>());
  }
  return from_key_values(kv);
}

}  // namespace socsamp
