// Acceptance checks. `acceptance K` runs criterion K; with no argument all run.
// Each criterion prints one line starting with PASS or FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "socsamp/analysis.hpp"
#include "socsamp/config.hpp"
#include "socsamp/error.hpp"
#include "socsamp/format.hpp"
#include "socsamp/harness.hpp"
#include "socsamp/protocol.hpp"

using namespace socsamp;

namespace {

// Pinned tolerances.
constexpr double kIdentityTol = 1e-12;
constexpr double kMartingaleTol = 1e-12;
constexpr double kDriftTol = 1e-10;
constexpr double kAbsorbedFraction = 0.99;
constexpr double kStandardErrors = 3.0;
constexpr double kConsensusTol = 1e-3;
constexpr double kConsensusFraction = 0.95;
constexpr double kMseTol = 1e-3;
constexpr double kMseFraction = 0.90;
constexpr double kSlopeLo = -1.3;
constexpr double kSlopeHi = -0.7;
constexpr double kSquareRatio = 10.0;
constexpr double kCondition1Tol = 0.0;
constexpr double kHbarTol = 1e-12;

const std::vector<double> kFourLaw = {0.4, 0.3, 0.2, 0.1};
const std::vector<double> kFiveLaw = {0.1, 0.25, 0.15, 0.3, 0.2};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double x) { return format_double(x); }

const std::vector<AlgorithmVariant>& variants() {
  static const std::vector<AlgorithmVariant> v = {AlgorithmVariant::averaging(),
                                                  AlgorithmVariant::decaying_averaging(),
                                                  AlgorithmVariant::censored_exchange()};
  return v;
}

VariantConfig variant_config(AlgorithmVariant::Kind kind) {
  VariantConfig v;
  v.kind = kind;
  return v;
}

ExperimentConfig small_grid(AlgorithmVariant::Kind kind) {
  ExperimentConfig c;
  c.topology.kind = Grid{5, 5};
  c.opinions = 4;
  c.initial.kind = InitialLaw::Kind::Explicit;
  c.initial.weights = kFourLaw;
  c.variant = variant_config(kind);
  c.schedule = StepSchedule::harmonic(10);
  return c;
}

// Rows drawn uniformly from the simplex.
NetworkState random_state(std::size_t n, std::size_t m, Rng& rng) {
  NetworkState s;
  s.t = rng.below(1000);
  s.q = Matrix(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (double& x : s.q.row(i)) total += (x = -std::log1p(-rng.uniform()));
    for (double& x : s.q.row(i)) x /= total;
  }
  return s;
}

Verdict lemma_identity() {
  double worst = 0.0;
  std::size_t rounds = 0;
  for (const TopologyKind& kind : {TopologyKind{Grid{5, 5}}, TopologyKind{Star{10}}}) {
    const Graph g = generate(TopologySpec{kind});
    for (const AlgorithmVariant& v : variants()) {
      Rng rng(derive_seed(101, rounds, 0));
      NetworkState state = init_state(draw_opinions(make_distribution(kFourLaw), g.size(), rng));
      const StepSchedule schedule = StepSchedule::harmonic(10);
      for (std::size_t t = 0; t < 1000; ++t) {
        auto [next, record] = step(state, v, schedule, g, rng);
        const StepDecomposition d = decompose(record, g, std::numeric_limits<double>::infinity());
        worst = std::max(worst, d.residual);
        state = std::move(next);
        ++rounds;
      }
    }
  }
  return {worst <= kIdentityTol,
          "max reconstruction gap " + num(worst) + " over " + std::to_string(rounds) + " rounds (tol " +
              num(kIdentityTol) + ")"};
}

Verdict martingale_oracle() {
  double worst = 0.0;
  std::size_t states = 0;
  Rng rng(202);
  for (std::size_t n : {2, 3}) {
    const Graph g = generate(TopologySpec{Grid{1, n}});
    for (const AlgorithmVariant& v : variants()) {
      for (int k = 0; k < 50; ++k) {
        const NetworkState s = random_state(n, 2, rng);
        const Matrix noise = conditional_mean_noise(s, v, StepSchedule::harmonic(10), g);
        for (double x : noise.data()) worst = std::max(worst, std::abs(x));
        ++states;
      }
    }
  }
  return {worst <= kMartingaleTol,
          "max |E[M | F]| " + num(worst) + " over " + std::to_string(states) + " states (tol " +
              num(kMartingaleTol) + ")"};
}

Verdict mass_conservation() {
  ExperimentConfig c = small_grid(AlgorithmVariant::Kind::CensoredExchange);
  c.horizon = 100000;
  const TrialResult r = run_trial(c, 0);
  const double drift = r.conditions.mean.max_drift;
  return {r.conditions.mean.applicable && drift <= kDriftTol,
          "max mass drift " + num(drift) + " over 1e5 rounds (tol " + num(kDriftTol) + ")"};
}

Verdict singleton_regime() {
  ExperimentConfig c = small_grid(AlgorithmVariant::Kind::Averaging);
  c.resample_opinions = false;
  c.trials = 2000;
  const std::size_t horizon = 10000;
  const AlgorithmVariant v = AlgorithmVariant::averaging();
  std::vector<std::size_t> counts(4, 0);
  std::size_t absorbed = 0;
  Distribution target;
  for (std::size_t k = 0; k < c.trials; ++k) {
    const TrialSetup setup = prepare_trial(c, k);
    target = setup.target;
    NetworkState state = setup.initial;
    Rng rng(setup.seeds.protocol);
    Workspace ws;
    std::optional<std::size_t> atom;
    // Rows within 1e-9 of one atom leave it before the horizon with negligible probability.
    while (state.t < horizon && !(atom = absorbed_atom(state.q))) advance(state, v, c.schedule, setup.graph, rng, ws);
    if (!atom) atom = absorbed_atom(state.q);
    if (atom) {
      ++absorbed;
      ++counts[*atom];
    }
  }
  const double fraction = static_cast<double>(absorbed) / static_cast<double>(c.trials);
  bool within = absorbed > 0;
  double worst_z = 0.0;
  std::string freq;
  for (std::size_t m = 0; m < 4; ++m) {
    const double f = absorbed ? static_cast<double>(counts[m]) / static_cast<double>(absorbed) : 0.0;
    const double se = std::sqrt(target[m] * (1.0 - target[m]) / static_cast<double>(std::max<std::size_t>(absorbed, 1)));
    const double z = se > 0 ? std::abs(f - target[m]) / se : (f == target[m] ? 0.0 : INFINITY);
    worst_z = std::max(worst_z, z);
    within = within && z <= kStandardErrors;
    freq += (m ? "," : "") + num(f) + "/" + num(target[m]);
  }
  return {fraction >= kAbsorbedFraction && within,
          "absorbed " + std::to_string(absorbed) + "/2000 (need " + num(kAbsorbedFraction) +
              "); atom freq/target " + freq + "; max |z| " + num(worst_z) + " (tol " + num(kStandardErrors) + ")"};
}

Verdict consensus_mean() {
  ExperimentConfig c = small_grid(AlgorithmVariant::Kind::DecayingAveraging);
  c.resample_opinions = false;
  c.trials = 500;
  c.horizon = 100000;
  const EnsembleResult e = run_ensemble(c);
  const std::vector<double>& target = e.trials.front().target;
  const std::size_t m = target.size();
  std::size_t agreed = 0;
  std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
  std::vector<double> final_disagreement;
  for (const TrialResult& r : e.trials) {
    const double d = r.metrics.disagreement.back();
    final_disagreement.push_back(d);
    if (d < kConsensusTol) ++agreed;
    const std::vector<double> mass = column_mass(r.final_q);
    for (std::size_t k = 0; k < m; ++k) {
      const double avg = mass[k] / static_cast<double>(r.final_q.rows());
      sum[k] += avg;
      sum_sq[k] += avg * avg;
    }
  }
  const double trials = static_cast<double>(e.trials.size());
  bool within = true;
  double worst_z = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double mean = sum[k] / trials;
    const double var = std::max(0.0, (sum_sq[k] - trials * mean * mean) / (trials - 1));
    const double se = std::sqrt(var / trials);
    const double z = se > 0 ? std::abs(mean - target[k]) / se : (mean == target[k] ? 0.0 : INFINITY);
    worst_z = std::max(worst_z, z);
    within = within && z <= kStandardErrors;
  }
  std::sort(final_disagreement.begin(), final_disagreement.end());
  const double fraction = static_cast<double>(agreed) / trials;
  return {fraction >= kConsensusFraction && within,
          "disagreement < " + num(kConsensusTol) + " at t=1e5 in " + std::to_string(agreed) +
              "/500 (need " + num(kConsensusFraction) + "), median disagreement " +
              num(final_disagreement[final_disagreement.size() / 2]) + "; consensus mean max |z| " +
              num(worst_z) + " (tol " + num(kStandardErrors) + ")"};
}

const EnsembleResult& censored_ensemble() {
  static const EnsembleResult e = [] {
    ExperimentConfig c = small_grid(AlgorithmVariant::Kind::CensoredExchange);
    c.horizon = 100000;
    c.trials = 50;
    c.rate_lo = 100;
    c.rate_hi = 10000;
    return run_ensemble(c);
  }();
  return e;
}

Verdict almost_sure_convergence() {
  const EnsembleResult& e = censored_ensemble();
  std::size_t ok = 0;
  double worst = 0.0;
  for (const TrialResult& r : e.trials) {
    worst = std::max(worst, r.metrics.mse.back());
    if (r.metrics.mse.back() <= kMseTol) ++ok;
  }
  const double fraction = static_cast<double>(ok) / static_cast<double>(e.trials.size());
  return {fraction >= kMseFraction, "mse <= " + num(kMseTol) + " at t=1e5 in " + std::to_string(ok) +
                                        "/50 (need " + num(kMseFraction) + "), worst " + num(worst) +
                                        ", ensemble mean " + num(e.mse_mean.back())};
}

Verdict rate() {
  const EnsembleResult& e = censored_ensemble();
  if (!e.rate_slope) return {false, "rate fit window degenerate"};
  const double s = *e.rate_slope;
  return {s >= kSlopeLo && s <= kSlopeHi,
          "log-log slope over [1e2, 1e4] " + num(s) + " (need [" + num(kSlopeLo) + ", " + num(kSlopeHi) + "])"};
}

Verdict step_pathologies() {
  bool pass = true;
  std::string detail;
  for (const auto& [name, kind] : {std::pair<std::string, TopologyKind>{"star", Star{100}},
                                   std::pair<std::string, TopologyKind>{"grid", Grid{10, 10}}}) {
    ExperimentConfig c;
    c.topology.kind = kind;
    c.opinions = 5;
    c.initial.kind = InitialLaw::Kind::Explicit;
    c.initial.weights = kFiveLaw;
    c.variant = variant_config(AlgorithmVariant::Kind::CensoredExchange);
    c.horizon = 20000;
    c.trials = 50;
    c.sweep = {SweepAxisKind::Schedule, {"harmonic:1", "square:1", "constant:0.05"}};
    const std::vector<EnsembleResult> curves = sweep(c);
    const double harmonic = curves[0].mse_mean.back();
    const double square = curves[1].mse_mean.back();
    // The plateau is the constant-step curve over the second half of the run.
    double plateau = INFINITY;
    for (std::size_t r = 0; r < curves[2].t.size(); ++r)
      if (curves[2].t[r] >= c.horizon / 2) plateau = std::min(plateau, curves[2].mse_mean[r]);
    const bool ok = square >= kSquareRatio * harmonic && plateau > harmonic;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + name + ": harmonic " + num(harmonic) + ", square " + num(square) +
              " (ratio " + num(square / harmonic) + "), constant plateau min " + num(plateau);
  }
  return {pass, detail + " (need ratio >= " + num(kSquareRatio) + ", plateau > harmonic)"};
}

Verdict topology_ordering() {
  std::vector<std::pair<std::string, TopologyKind>> graphs = {{"grid", Grid{10, 10}},
                                                              {"pa", PreferentialAttachment{100, 3}},
                                                              {"ws", WattsStrogatz{10, 10, 0.1}},
                                                              {"star", Star{100}}};
  std::vector<double> medians;
  std::string detail;
  for (const auto& [name, kind] : graphs) {
    ExperimentConfig c;
    c.topology.kind = kind;
    c.opinions = 5;
    c.initial.kind = InitialLaw::Kind::UniformSupport;
    c.variant = variant_config(AlgorithmVariant::Kind::CensoredExchange);
    c.schedule = StepSchedule::harmonic(10);
    c.horizon = 10000;
    c.trials = 50;
    c.threshold = 1e-2;
    const std::optional<double> med = time_quantile(run_ensemble(c), 0.5);
    medians.push_back(med.value_or(INFINITY));
    detail += (detail.empty() ? "" : ", ") + name + " " + (med ? num(*med) : std::string("never"));
  }
  const double star = medians.back();
  bool slowest = true;
  for (std::size_t k = 0; k + 1 < medians.size(); ++k) slowest = slowest && medians[k] < star;
  return {slowest, "median time to mse 1e-2: " + detail};
}

Verdict condition_checkers() {
  bool pass = true;
  std::string detail;
  const Graph grid = generate(TopologySpec{Grid{5, 5}});
  double worst_c1 = 0.0;
  double c4_ratio = NAN;
  for (const AlgorithmVariant& v : variants()) {
    ExperimentConfig c = small_grid(v.kind());
    c.horizon = 300;
    const TrialResult r = run_trial(c, 0);
    worst_c1 = std::max(worst_c1, r.conditions.mixing.max_residual);
    pass = pass && r.conditions.mixing.pass && r.conditions.mixing.max_residual <= kCondition1Tol;
    if (v.kind() == AlgorithmVariant::Kind::CensoredExchange) {
      c4_ratio = r.conditions.perturbation.sup_ratio;
      pass = pass && r.conditions.perturbation.evaluated && std::isfinite(c4_ratio);
    }
    const auto limit = check_limiting_dynamics(v, grid);
    pass = pass && limit.ones_residual <= kHbarTol && limit.symmetric && limit.simple_zero &&
           limit.largest_nonzero_eigenvalue < 0.0;
    detail += std::string(v.name()) + " H1 " + num(limit.ones_residual) + " lambda2 " +
              num(limit.largest_nonzero_eigenvalue) + (limit.symmetric ? " sym" : " asym") +
              (limit.simple_zero ? " simple0; " : " multi0; ");
  }
  const bool harmonic = classify_schedule(StepSchedule::harmonic(1)).pass &&
                        classify_schedule(StepSchedule::harmonic(10)).pass;
  const bool square = !classify_schedule(StepSchedule::square(1)).pass;
  const bool constant = !classify_schedule(StepSchedule::constant(0.05)).pass;
  pass = pass && harmonic && square && constant;
  detail += "condition 1 max residual " + num(worst_c1) + "; schedules harmonic " + (harmonic ? "pass" : "fail") +
            ", square " + (square ? "fail" : "pass") + ", constant " + (constant ? "fail" : "pass") +
            "; censored condition 4 ratio " + num(c4_ratio);
  return {pass, detail};
}

Verdict determinism() {
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig c = small_grid(AlgorithmVariant::Kind::CensoredExchange);
    c.horizon = 10000;
    c.trials = 8;
    c.trace_nodes = {0, 12};
    configs.push_back(c);
  }
  {
    ExperimentConfig c;
    c.topology.kind = ErdosRenyi{40, 0.2};
    c.opinions = 6;
    c.variant = variant_config(AlgorithmVariant::Kind::DecayingAveraging);
    c.schedule = StepSchedule::harmonic(5);
    c.horizon = 5000;
    c.trials = 7;
    c.trace_nodes = {3};
    configs.push_back(c);
  }
  bool same = true;
  std::size_t compared = 0;
  for (const ExperimentConfig& c : configs) {
    const EnsembleResult a = run_ensemble(c, {1});
    const EnsembleResult b = run_ensemble(c, {2});
    same = same && results_csv(a) == results_csv(b) && summary_json(a) == summary_json(b);
    compared += 2;
    for (std::size_t k = 0; k < a.trials.size(); ++k) {
      same = same && trial_csv(a.trials[k]) == trial_csv(b.trials[k]);
      ++compared;
      for (std::size_t j = 0; j < a.trials[k].traces.size(); ++j) {
        same = same && trace_csv(a.trials[k].traces[j], a.t) == trace_csv(b.trials[k].traces[j], b.t);
        ++compared;
      }
    }
  }
  return {same, std::to_string(compared) + " CSV/JSON outputs compared between 1 and 2 threads"};
}

struct Criterion {
  const char* name;
  std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {"reconstruction identity", lemma_identity},
      {"martingale difference", martingale_oracle},
      {"mass conservation", mass_conservation},
      {"singleton regime", singleton_regime},
      {"consensus with mean", consensus_mean},
      {"almost-sure convergence", almost_sure_convergence},
      {"1/t rate", rate},
      {"step-size pathologies", step_pathologies},
      {"topology ordering", topology_ordering},
      {"condition checkers", condition_checkers},
      {"determinism", determinism},
  };
  return list;
}

bool run_one(std::size_t k) {
  const Criterion& c = criteria()[k - 1];
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = c.run();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char elapsed[32];
  std::snprintf(elapsed, sizeof elapsed, "%.1fs", secs);
  std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << c.name << "): " << v.detail << " ["
            << elapsed << "]" << std::endl;
  return v.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t count = criteria().size();
  bool ok = true;
  if (argc > 1) {
    for (int a = 1; a < argc; ++a) {
      const long k = std::strtol(argv[a], nullptr, 10);
      if (k < 1 || static_cast<std::size_t>(k) > count) {
        std::cerr << "usage: acceptance [1.." << count << "]...\n";
        return 2;
      }
      ok = run_one(static_cast<std::size_t>(k)) && ok;
    }
  } else {
    for (std::size_t k = 1; k <= count; ++k) ok = run_one(k) && ok;
  }
  return ok ? 0 : 1;
}
