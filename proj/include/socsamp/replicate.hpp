#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "socsamp/config.hpp"
#include "socsamp/harness.hpp"

namespace socsamp {

enum class Scale { Desk, Paper };

/// One configuration of a figure; a sweep axis fans it out into curves.
struct ReplicateRun {
  std::string name;
  ExperimentConfig config;
  bool per_trial = false;
};

struct Scenario {
  std::string figure;
  std::string description;
  std::vector<ReplicateRun> runs;
};

/// "fig1" ... "fig7".
std::vector<std::string> scenario_names();
/// Throws ConfigError for an unknown figure.
Scenario scenario(const std::string& figure, Scale scale);

/// Writes <dir>/<run>/ for plain runs and <dir>/<run>/<point>/ for each
/// sweep point, plus <dir>/scenario.txt listing every configuration used.
void run_scenario(const Scenario& scenario, const std::filesystem::path& dir, const EnsembleOptions& options = {});

/// "harmonic:1" -> "harmonic_1"; keeps [A-Za-z0-9._-].
std::string path_component(const std::string& text);

}  // namespace socsamp
