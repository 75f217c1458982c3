#include <doctest.h>

#include <string>

#include "socsamp/config.hpp"
#include "socsamp/error.hpp"

using namespace socsamp;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("config accepted: " << text);
  return {};
}

ExperimentConfig sample() {
  ExperimentConfig c;
  c.label = "grid censor";
  c.topology.kind = WattsStrogatz{10, 10, 0.1};
  c.resample_graph = false;
  c.opinions = 5;
  c.initial.kind = InitialLaw::Kind::Explicit;
  c.initial.weights = {0.1, 0.25, 0.15, 0.3, 0.2};
  c.variant.kind = AlgorithmVariant::Kind::CensoredExchange;
  c.variant.edge_weight = 0.5;
  c.schedule = StepSchedule::harmonic(10);
  c.schedule.uncapped = true;
  c.horizon = 1234;
  c.trials = 7;
  c.base_seed = 18446744073709551615ULL;
  c.stride.kind = StrideKind::Linear;
  c.stride.every = 17;
  c.threshold = 1e-3;
  c.rate_lo = 10;
  c.rate_hi = 1000;
  c.trace_nodes = {0, 5, 99};
  return c;
}

}  // namespace

TEST_CASE("text round trip") {
  const ExperimentConfig c = sample();
  CHECK(parse_config(to_text(c)) == c);
  CHECK(from_key_values(to_key_values(c)) == c);
  CHECK(parse_config(to_text(ExperimentConfig{})) == ExperimentConfig{});

  ExperimentConfig s = c;
  s.sweep = {SweepAxisKind::Schedule, {"harmonic:1", "constant:0.05", "square:1"}};
  CHECK(parse_config(to_text(s)) == s);
}

TEST_CASE("comments, blanks and defaults") {
  const ExperimentConfig c = parse_config("# header\n\n  topology = star:100   # centre is node 0\nopinions=3\n");
  CHECK(c.topology.kind == TopologyKind{Star{100}});
  CHECK(c.opinions == 3);
  CHECK(c.horizon == ExperimentConfig{}.horizon);
}

TEST_CASE("diagnostics carry line and field") {
  CHECK(config_error("opinions = 3\nhorizon = ten\n").find("t.cfg:2: field 'horizon'") != std::string::npos);
  CHECK(config_error("colour = blue\n").find("t.cfg:1: field 'colour': unknown key") != std::string::npos);
  CHECK(config_error("opinions 3\n").find("t.cfg:1:") != std::string::npos);
  CHECK(config_error("seed = 1\nseed = 2\n").find("field 'seed': given more than once") != std::string::npos);
  CHECK(config_error("topology = ring:5\n").find("field 'topology'") != std::string::npos);
  CHECK(config_error("schedule = cosine\n").find("field 'schedule'") != std::string::npos);
  CHECK(config_error("initial = explicit\ninitial.weights = 0.5, 0.6\nopinions = 2\n").find("initial.weights") !=
        std::string::npos);
  CHECK(config_error("initial = explicit\ninitial.weights = 0.5, 0.5\nopinions = 3\n").find("initial.weights") !=
        std::string::npos);
  CHECK(config_error("trials = 0\n").find("field 'trials'") != std::string::npos);
  CHECK(config_error("horizon = 0\n").find("field 'horizon'") != std::string::npos);
  CHECK(config_error("schedule.cap = 2\n").find("field 'schedule.cap'") != std::string::npos);
  CHECK(config_error("schedule.c = -1\n").find("field 'schedule.c'") != std::string::npos);
  CHECK(config_error("rate.window = 100:10\n").find("field 'rate.window'") != std::string::npos);
  CHECK(config_error("topology = grid:2x2\ntrace.nodes = 4\n").find("field 'trace.nodes'") != std::string::npos);
  CHECK(config_error("initial = skewed\nopinions = 2\n").find("field 'opinions'") != std::string::npos);
  CHECK(config_error("sweep.axis = schedule\n").find("field 'sweep.values'") != std::string::npos);
  CHECK(config_error("sweep.axis = schedule\nsweep.values = harmonic:1, wobble:2\n").find("sweep.values") !=
        std::string::npos);
  CHECK(config_error("stride.factor = 1\n").find("field 'stride.factor'") != std::string::npos);
  CHECK(config_error("topology.resample = maybe\n").find("field 'topology.resample'") != std::string::npos);
}

TEST_CASE("hash follows the canonical text") {
  const ExperimentConfig c = sample();
  CHECK(config_hash(c) == config_hash(parse_config(to_text(c))));
  CHECK(config_hash(c).size() == 16);
  ExperimentConfig d = c;
  d.base_seed = 2;
  CHECK(config_hash(c) != config_hash(d));
}

TEST_CASE("schedule text") {
  CHECK(parse_schedule("harmonic:10") == StepSchedule::harmonic(10));
  CHECK(parse_schedule("constant:0.05") == StepSchedule::constant(0.05));
  CHECK(parse_schedule("square:1") == StepSchedule::square(1));
  CHECK(schedule_label(StepSchedule::constant(0.05)) == "constant:0.05");
  try {
    parse_schedule("harmonic:x");
    FAIL("accepted a bad schedule");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadParameters);
  }
}

TEST_CASE("sweep expansion") {
  ExperimentConfig c;
  c.label = "base";
  c.sweep = {SweepAxisKind::Topology, {"grid:10x10", "star:100"}};
  const auto points = expand_sweep(c);
  REQUIRE(points.size() == 2);
  CHECK(points[1].topology.kind == TopologyKind{Star{100}});
  CHECK(points[1].sweep.kind == SweepAxisKind::None);
  CHECK(points[0].label == "base topology=grid:10x10");
  CHECK(points[0].base_seed == points[1].base_seed);

  c.sweep = {SweepAxisKind::Support, {"2", "15"}};
  c.opinions = 150;
  const auto sparse = expand_sweep(c);
  CHECK(sparse[1].initial.kind == InitialLaw::Kind::UniformSupport);
  CHECK(sparse[1].initial.support == 15);

  c.sweep = {SweepAxisKind::Skew, {"5", "26"}};
  const auto skew = expand_sweep(c);
  CHECK(skew[1].opinions == 26);
  CHECK(skew[1].initial.kind == InitialLaw::Kind::Skewed);

  c.sweep = {SweepAxisKind::Opinions, {"2", "30"}};
  c.initial = {};
  CHECK(expand_sweep(c)[1].opinions == 30);
}

TEST_CASE("initial laws") {
  const Distribution skew = skewed_law(10);
  CHECK(skew[0] == doctest::Approx(0.38).epsilon(1e-15));
  CHECK(skew[1] == doctest::Approx(0.38).epsilon(1e-15));
  for (std::size_t m = 2; m < 10; ++m) CHECK(skew[m] == doctest::Approx(0.03));

  Rng rng(3);
  const Distribution sparse = resolve_law(InitialLaw{InitialLaw::Kind::UniformSupport, {}, 4}, 150, rng);
  std::size_t support = 0;
  for (std::size_t m = 0; m < 150; ++m)
    if (sparse[m] > 0.0) {
      ++support;
      CHECK(sparse[m] == 0.25);
    }
  CHECK(support == 4);

  const Distribution uniform = resolve_law(InitialLaw{}, 5, rng);
  for (std::size_t m = 0; m < 5; ++m) CHECK(uniform[m] == 0.2);
}

TEST_CASE("recording grid") {
  const auto log_grid = recording_rounds(RecordStride{}, 10);
  CHECK(log_grid == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  const auto big = recording_rounds(RecordStride{}, 100000);
  CHECK(big.front() == 0);
  CHECK(big.back() == 100000);
  CHECK(big.size() < 80);
  const auto lin = recording_rounds(RecordStride{StrideKind::Linear, 1.2, 4}, 10);
  CHECK(lin == std::vector<std::size_t>{0, 4, 8, 10});
}
