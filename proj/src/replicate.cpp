#include "socsamp/replicate.hpp"

#include <fstream>

#include "socsamp/error.hpp"

namespace socsamp {

namespace {

const std::vector<double> kSmallLaw = {0.4, 0.3, 0.2, 0.1};
const std::vector<double> kFigureFourLaw = {0.1, 0.25, 0.15, 0.3, 0.2};

ExperimentConfig small_grid(AlgorithmVariant::Kind kind) {
  ExperimentConfig c;
  c.topology.kind = Grid{5, 5};
  c.opinions = 4;
  c.initial.kind = InitialLaw::Kind::Explicit;
  c.initial.weights = kSmallLaw;
  c.variant.kind = kind;
  c.schedule = StepSchedule::harmonic(10.0);
  c.trials = 1;
  c.trace_nodes = {0};
  return c;
}

std::vector<std::pair<std::string, TopologyKind>> four_topologies(bool with_star) {
  std::vector<std::pair<std::string, TopologyKind>> out;
  if (!with_star) out.emplace_back("erdos_renyi", ErdosRenyi{100, 0.6});
  out.emplace_back("grid", Grid{10, 10});
  out.emplace_back("preferential_attachment", PreferentialAttachment{100, 3});
  out.emplace_back("watts_strogatz", WattsStrogatz{10, 10, 0.1});
  if (with_star) out.emplace_back("star", Star{100});
  return out;
}

std::vector<std::string> integer_range(std::size_t lo, std::size_t hi) {
  std::vector<std::string> out;
  for (std::size_t v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
  return out;
}

Scenario fig1(Scale) {
  Scenario s{"fig1", "averaging with social samples on a 5x5 grid, M=4: one node's estimate", {}};
  ExperimentConfig c = small_grid(AlgorithmVariant::Kind::Averaging);
  c.horizon = 2000;
  c.label = "fig1";
  s.runs.push_back({"averaging", c, true});
  return s;
}

Scenario fig2(Scale scale) {
  Scenario s{"fig2", "decaying-step averaging on a 5x5 grid, M=4, delta=10/(t+1): every node's estimate", {}};
  ExperimentConfig c = small_grid(AlgorithmVariant::Kind::DecayingAveraging);
  c.horizon = scale == Scale::Paper ? 100000 : 10000;
  c.trace_nodes.clear();
  for (std::size_t i = 0; i < 25; ++i) c.trace_nodes.push_back(i);
  c.label = "fig2";
  s.runs.push_back({"decaying_averaging", c, true});
  return s;
}

Scenario fig3(Scale scale) {
  Scenario s{"fig3", "censored mass exchange on a 5x5 grid, M=4, delta=10/(t+1): a few nodes' estimates", {}};
  ExperimentConfig c = small_grid(AlgorithmVariant::Kind::CensoredExchange);
  c.horizon = scale == Scale::Paper ? 100000 : 10000;
  c.trace_nodes = {0, 6, 12, 18, 24};
  c.label = "fig3";
  s.runs.push_back({"censored_exchange", c, true});
  return s;
}

Scenario fig4(Scale scale) {
  Scenario s{"fig4", "average mse per node for four step-size schedules on four 100-node graphs, M=5", {}};
  for (const auto& [name, kind] : four_topologies(true)) {
    ExperimentConfig c;
    c.topology.kind = kind;
    c.opinions = 5;
    c.initial.kind = InitialLaw::Kind::Explicit;
    c.initial.weights = kFigureFourLaw;
    c.variant.kind = AlgorithmVariant::Kind::CensoredExchange;
    c.schedule = StepSchedule::harmonic(1.0);
    c.horizon = scale == Scale::Paper ? 10000 : 2000;
    c.trials = scale == Scale::Paper ? 100 : 10;
    c.label = "fig4 " + name;
    c.sweep = {SweepAxisKind::Schedule, {"harmonic:1", "constant:0.05", "constant:0.01", "square:1"}};
    s.runs.push_back({name, c, false});
  }
  return s;
}

Scenario fig5(Scale scale) {
  Scenario s{"fig5", "time to reach mse 1e-2 against M for a uniform law on four 100-node graphs", {}};
  for (const auto& [name, kind] : four_topologies(true)) {
    ExperimentConfig c;
    c.topology.kind = kind;
    c.initial.kind = InitialLaw::Kind::UniformSupport;
    c.variant.kind = AlgorithmVariant::Kind::CensoredExchange;
    c.schedule = StepSchedule::harmonic(10.0);
    c.horizon = scale == Scale::Paper ? 20000 : 5000;
    c.trials = scale == Scale::Paper ? 50 : 10;
    c.threshold = 1e-2;
    c.label = "fig5 " + name;
    c.sweep = {SweepAxisKind::Opinions, {"2", "5", "10", "15", "20", "25", "30"}};
    s.runs.push_back({name, c, false});
  }
  return s;
}

Scenario fig6(Scale scale) {
  Scenario s{"fig6", "average mse per node for uniform laws on M* of M=150 opinions, four 100-node graphs", {}};
  for (const auto& [name, kind] : four_topologies(false)) {
    ExperimentConfig c;
    c.topology.kind = kind;
    c.opinions = 150;
    c.initial.kind = InitialLaw::Kind::UniformSupport;
    c.variant.kind = AlgorithmVariant::Kind::CensoredExchange;
    c.schedule = StepSchedule::harmonic(10.0);
    c.horizon = scale == Scale::Paper ? 10000 : 2000;
    c.trials = scale == Scale::Paper ? 50 : 5;
    c.label = "fig6 " + name;
    c.sweep = {SweepAxisKind::Support, integer_range(2, 15)};
    s.runs.push_back({name, c, false});
  }
  return s;
}

Scenario fig7(Scale scale) {
  Scenario s{"fig7", "average mse per node for the skewed law, M=5..26, four 100-node graphs", {}};
  for (const auto& [name, kind] : four_topologies(false)) {
    ExperimentConfig c;
    c.topology.kind = kind;
    c.initial.kind = InitialLaw::Kind::Skewed;
    c.variant.kind = AlgorithmVariant::Kind::CensoredExchange;
    c.schedule = StepSchedule::harmonic(10.0);
    c.horizon = scale == Scale::Paper ? 10000 : 2000;
    c.trials = scale == Scale::Paper ? 50 : 5;
    c.label = "fig7 " + name;
    c.sweep = {SweepAxisKind::Skew, integer_range(5, 26)};
    s.runs.push_back({name, c, false});
  }
  return s;
}

}  // namespace

std::vector<std::string> scenario_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}; }

Scenario scenario(const std::string& figure, Scale scale) {
  if (figure == "fig1") return fig1(scale);
  if (figure == "fig2") return fig2(scale);
  if (figure == "fig3") return fig3(scale);
  if (figure == "fig4") return fig4(scale);
  if (figure == "fig5") return fig5(scale);
  if (figure == "fig6") return fig6(scale);
  if (figure == "fig7") return fig7(scale);
  throw Error(ErrorCode::ConfigError, "unknown figure '" + figure + "' (expected fig1 ... fig7)");
}

std::string path_component(const std::string& text) {
  std::string out;
  for (char ch : text) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                      ch == '.' || ch == '_' || ch == '-';
    out += keep ? ch : '_';
  }
  return out;
}

void run_scenario(const Scenario& scenario, const std::filesystem::path& dir, const EnsembleOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  std::ofstream index(dir / "scenario.txt", std::ios::binary);
  if (!index) throw Error(ErrorCode::IoFailure, "cannot write " + (dir / "scenario.txt").string());
  index << "# " << scenario.figure << ": " << scenario.description << "\n";

  for (const auto& run : scenario.runs) {
    const auto run_dir = dir / path_component(run.name);
    index << "\n[" << run.name << "]\n" << to_text(run.config);
    if (run.config.sweep.kind == SweepAxisKind::None) {
      emit_results(run_ensemble(run.config, options), run_dir, run.per_trial);
      continue;
    }
    const auto points = expand_sweep(run.config);
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto result = run_ensemble(points[k], options);
      emit_results(result, run_dir / path_component(run.config.sweep.values[k]), run.per_trial);
    }
  }
  if (!index) throw Error(ErrorCode::IoFailure, "failed writing " + (dir / "scenario.txt").string());
}

}  // namespace socsamp
