#include "socsamp/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "socsamp/analysis.hpp"
#include "socsamp/error.hpp"
#include "socsamp/format.hpp"
#include "socsamp/harness.hpp"
#include "socsamp/replicate.hpp"

namespace socsamp {

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> stride;
  bool paper_delta = false;

  void apply(ExperimentConfig& c) const {
    if (seed) c.base_seed = *seed;
    if (trials) c.trials = *trials;
    if (horizon) c.horizon = *horizon;
    if (stride) {
      c.stride.kind = StrideKind::Linear;
      c.stride.every = *stride;
    }
    if (paper_delta) c.schedule.uncapped = true;
  }
};

void add_overrides(CLI::App* cmd, Overrides& o, std::size_t& threads) {
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--trials", o.trials, "Number of trials");
  cmd->add_option("--horizon", o.horizon, "Rounds per trial");
  cmd->add_option("--stride", o.stride, "Record every N rounds instead of the logarithmic grid");
  cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--paper-delta", o.paper_delta, "Use the nominal step sizes without the cap");
}

void print_summary(std::ostream& out, const EnsembleResult& r, const std::filesystem::path& dir) {
  out << (r.config.label.empty() ? std::string("run") : r.config.label) << ": " << r.trials.size() << " trials, "
      << "t=" << r.t.back() << " mse=" << format_double(r.mse_mean.back())
      << " stderr=" << format_double(r.mse_stderr.back());
  if (r.rate_slope) out << " slope=" << format_double(*r.rate_slope);
  out << " -> " << dir.string() << "\n";
}

Matrix random_rows(std::size_t n, std::size_t m, Rng& rng) {
  Matrix q(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      // Zero entries are kept likely so that censoring and silence show up.
      const double u = rng.uniform();
      q(i, k) = u < 0.25 ? 0.0 : u;
      sum += q(i, k);
    }
    if (sum == 0.0) {
      q(i, rng.below(m)) = 1.0;
      continue;
    }
    for (std::size_t k = 0; k < m; ++k) q(i, k) /= sum;
  }
  return q;
}

struct CheckLine {
  bool pass;
  std::string text;
};

int run_check(const ExperimentConfig& config, std::size_t states, std::ostream& out) {
  const TrialSetup setup = prepare_trial(config, 0);
  const Graph& g = setup.graph;
  const std::size_t n = g.size();
  const std::size_t m = config.opinions;
  out << "check: " << to_string(config.topology.kind) << " n=" << n << " edges=" << g.edge_count()
      << " M=" << m << " schedule=" << schedule_label(config.schedule) << " states=" << states
      << " joint outcomes=" << format_double(std::pow(static_cast<double>(m + 1), static_cast<double>(n))) << "\n";

  std::vector<CheckLine> lines;
  Rng rng(derive_seed(config.base_seed, 3, 0));
  const std::vector<AlgorithmVariant> variants = {AlgorithmVariant::averaging(),
                                                  AlgorithmVariant::decaying_averaging(),
                                                  AlgorithmVariant::censored_exchange(config.variant.edge_weight)};
  for (const auto& variant : variants) {
    const std::string name(variant.name());
    double noise = 0.0, perturbation = 0.0, reconstruction = 0.0;
    std::vector<RoundRecord> records;
    for (std::size_t k = 0; k < states; ++k) {
      NetworkState state{rng.below(1000), random_rows(n, m, rng)};
      const ConditionalMeans means = enumerate_conditional_means(state, variant, config.schedule, g);
      noise = std::max(noise, means.noise.max_abs());
      perturbation =
          std::max(perturbation, (expected_perturbation(state, variant, config.schedule, g) - means.perturbation).max_abs());
      auto [next, record] = step(state, variant, config.schedule, g, rng);
      reconstruction = std::max(reconstruction, decompose(record, g).residual);
      records.push_back(std::move(record));
    }
    lines.push_back({noise <= 1e-12, name + " martingale noise: max |E[M]| = " + format_double(noise)});
    lines.push_back({perturbation <= 1e-12,
                     name + " perturbation mean: closed form vs enumeration gap = " + format_double(perturbation)});
    lines.push_back({reconstruction <= 1e-12, name + " decomposition: max reconstruction gap = " +
                                                  format_double(reconstruction)});

    const ConditionReport report = check_conditions(records, variant, config.schedule, g, setup.target);
    lines.push_back({report.mixing.pass,
                     name + " condition 1: max row residual = " + format_double(report.mixing.max_residual)});
    lines.push_back({true, name + " condition 2: " + report.step_sizes.family +
                               (report.step_sizes.pass ? " (satisfied)" : " (not satisfied)")});
    lines.push_back({report.limit.pass, name + " condition 3: largest nonzero eigenvalue = " +
                                            format_double(report.limit.largest_nonzero_eigenvalue) +
                                            ", simple zero = " + (report.limit.simple_zero ? "yes" : "no") +
                                            ", |lambda| < 1 = " + (report.limit.literal_contraction ? "yes" : "no")});
    lines.push_back({std::isfinite(report.perturbation.sup_ratio),
                     name + " condition 4: sup |E[C]| / delta = " + format_double(report.perturbation.sup_ratio)});

    if (variant.conserves_mass()) {
      NetworkState state = setup.initial;
      std::vector<RoundRecord> trajectory;
      Rng walk(derive_seed(config.base_seed, 4, 0));
      for (std::size_t t = 0; t < 200; ++t) {
        auto [next, record] = step(state, variant, config.schedule, g, walk);
        trajectory.push_back(std::move(record));
        state = std::move(next);
      }
      const ConditionReport mass = check_conditions(trajectory, variant, config.schedule, g, setup.target);
      lines.push_back({mass.mean.pass, name + " condition 5: max mass drift over 200 rounds = " +
                                           format_double(mass.mean.max_drift)});
    }
  }

  bool all = true;
  for (const auto& line : lines) {
    out << (line.pass ? "PASS " : "FAIL ") << line.text << "\n";
    all = all && line.pass;
  }
  return all ? kExitOk : kExitRuntime;
}

ExperimentConfig check_default() {
  ExperimentConfig c;
  c.topology.kind = Grid{1, 2};
  c.opinions = 2;
  c.initial.kind = InitialLaw::Kind::UniformSupport;
  c.schedule = StepSchedule::harmonic(10.0);
  return c;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed histogram estimation by social sampling: simulations and checks", "socsamp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  std::string config_path;
  std::string out_dir = "out";
  std::size_t threads = 1;
  Overrides overrides;
  bool per_trial = false;

  auto* run = app.add_subcommand("run", "Run one ensemble from a config file");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--per-trial", per_trial, "Also write per-trial CSVs");
  add_overrides(run, overrides, threads);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the sweep axis declared in a config file");
  sweep_cmd->add_option("--config", config_path, "Config file")->required();
  sweep_cmd->add_option("--out", out_dir, "Output directory");
  sweep_cmd->add_flag("--per-trial", per_trial, "Also write per-trial CSVs");
  add_overrides(sweep_cmd, overrides, threads);

  std::string topology_text;
  std::string graph_out = "-";
  std::uint64_t graph_seed = 1;
  auto* graph_cmd = app.add_subcommand("graph", "Generate a topology and write its edge list");
  graph_cmd->add_option("--topology", topology_text, "e.g. grid:10x10, star:100, er:100:0.6, pa:100:3, ws:10x10:0.1")
      ->required();
  graph_cmd->add_option("--seed", graph_seed, "Seed for random topologies");
  graph_cmd->add_option("--out", graph_out, "Edge list file, '-' for stdout");

  std::size_t states = 50;
  auto* check_cmd = app.add_subcommand("check", "Condition checks and enumeration oracles on a small graph");
  check_cmd->add_option("--config", config_path, "Config file (default: 2-node path, M=2)");
  check_cmd->add_option("--seed", overrides.seed, "Base seed");
  check_cmd->add_option("--states", states, "Random states per variant")->check(CLI::PositiveNumber);

  std::string figure;
  std::string scale_text = "desk";
  auto* replicate_cmd = app.add_subcommand("replicate", "Bundled figure scenarios");
  replicate_cmd->add_option("figure", figure, "fig1 ... fig7 or all")->required();
  replicate_cmd->add_option("--scale", scale_text, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  replicate_cmd->add_option("--out", out_dir, "Output directory");
  add_overrides(replicate_cmd, overrides, threads);

  std::vector<std::string> argv_store = {"socsamp"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const EnsembleOptions options{threads};
  try {
    if (run->parsed() || sweep_cmd->parsed()) {
      ExperimentConfig config = load_config(config_path);
      overrides.apply(config);
      validate(config);
      if (run->parsed()) {
        if (config.sweep.kind != SweepAxisKind::None)
          throw Error(ErrorCode::ConfigError, config_path + ": field 'sweep.axis': use the sweep subcommand");
        const auto result = run_ensemble(config, options);
        emit_results(result, out_dir, per_trial);
        print_summary(out, result, out_dir);
      } else {
        if (config.sweep.kind == SweepAxisKind::None)
          throw Error(ErrorCode::ConfigError, config_path + ": field 'sweep.axis': no sweep axis declared");
        const auto points = expand_sweep(config);
        for (std::size_t k = 0; k < points.size(); ++k) {
          const auto result = run_ensemble(points[k], options);
          const auto dir = std::filesystem::path(out_dir) / path_component(config.sweep.values[k]);
          emit_results(result, dir, per_trial);
          print_summary(out, result, dir);
        }
      }
      return kExitOk;
    }

    if (graph_cmd->parsed()) {
      TopologySpec spec;
      try {
        spec.kind = parse_topology(topology_text);
      } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, "--topology: " + e.detail());
      }
      spec.seed = graph_seed;
      const Graph g = generate(spec);
      if (graph_out == "-") {
        write_edge_list(out, g);
      } else {
        std::ofstream file(graph_out, std::ios::binary);
        if (!file) throw Error(ErrorCode::IoFailure, "cannot open " + graph_out + " for writing");
        write_edge_list(file, g);
        if (!file) throw Error(ErrorCode::IoFailure, "failed writing " + graph_out);
      }
      err << to_string(spec.kind) << ": n=" << g.size() << " edges=" << g.edge_count()
          << " d_max=" << g.max_degree() << " components=" << component_count(g) << "\n";
      return kExitOk;
    }

    if (check_cmd->parsed()) {
      ExperimentConfig config = config_path.empty() ? check_default() : load_config(config_path);
      overrides.apply(config);
      validate(config);
      return run_check(config, states, out);
    }

    if (replicate_cmd->parsed()) {
      const Scale scale = scale_text == "paper" ? Scale::Paper : Scale::Desk;
      std::vector<std::string> figures = figure == "all" ? scenario_names() : std::vector<std::string>{figure};
      std::vector<Scenario> scenarios;
      for (const auto& name : figures) {
        Scenario s = scenario(name, scale);
        for (auto& r : s.runs) {
          overrides.apply(r.config);
          validate(r.config);
        }
        scenarios.push_back(std::move(s));
      }
      for (const auto& s : scenarios) {
        const auto dir = std::filesystem::path(out_dir) / s.figure;
        run_scenario(s, dir, options);
        out << s.figure << " (" << scale_text << "): " << s.description << " -> " << dir.string() << "\n";
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace socsamp
