#include "socsamp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "socsamp/error.hpp"
#include "socsamp/format.hpp"

namespace socsamp {

Distribution skewed_law(std::size_t opinions) {
  if (opinions < 3) throw Error(ErrorCode::BadParameters, "skewed law needs at least 3 opinions");
  std::vector<double> w(opinions, 0.24 / static_cast<double>(opinions - 2));
  w[0] = 0.38;
  w[1] = 0.38;
  return make_distribution(w);
}

Distribution resolve_law(const InitialLaw& law, std::size_t opinions, Rng& rng) {
  switch (law.kind) {
    case InitialLaw::Kind::Explicit: {
      if (law.weights.size() != opinions)
        throw Error(ErrorCode::BadParameters, "explicit law has " + std::to_string(law.weights.size()) +
                                                  " weights for " + std::to_string(opinions) + " opinions");
      return make_distribution(law.weights);
    }
    case InitialLaw::Kind::Skewed: return skewed_law(opinions);
    case InitialLaw::Kind::UniformSupport: {
      const std::size_t support = law.support == 0 ? opinions : law.support;
      if (support > opinions) throw Error(ErrorCode::BadParameters, "support larger than the alphabet");
      std::vector<double> w(opinions, 0.0);
      if (support == opinions) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(opinions));
      } else {
        std::vector<std::size_t> idx(opinions);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t k = 0; k < support; ++k) {
          const std::size_t pick = k + rng.below(opinions - k);
          std::swap(idx[k], idx[pick]);
          w[idx[k]] = 1.0 / static_cast<double>(support);
        }
      }
      return make_distribution(w);
    }
  }
  throw Error(ErrorCode::BadParameters, "unknown initial law");
}

std::vector<std::size_t> recording_rounds(const RecordStride& stride, std::size_t horizon) {
  std::set<std::size_t> rounds{0, horizon};
  if (stride.kind == StrideKind::Linear) {
    const std::size_t every = std::max<std::size_t>(stride.every, 1);
    for (std::size_t t = every; t < horizon; t += every) rounds.insert(t);
  } else {
    for (int k = 0;; ++k) {
      const double r = std::ceil(std::pow(stride.factor, k));
      if (!(r <= static_cast<double>(horizon))) break;
      rounds.insert(static_cast<std::size_t>(r));
    }
  }
  return {rounds.begin(), rounds.end()};
}

AlgorithmVariant make_variant(const VariantConfig& config) {
  switch (config.kind) {
    case AlgorithmVariant::Kind::Averaging: return AlgorithmVariant::averaging();
    case AlgorithmVariant::Kind::DecayingAveraging: return AlgorithmVariant::decaying_averaging();
    case AlgorithmVariant::Kind::CensoredExchange: return AlgorithmVariant::censored_exchange(config.edge_weight);
    case AlgorithmVariant::Kind::Custom: break;
  }
  throw Error(ErrorCode::ConfigError, "field 'variant': custom rules cannot be configured from a file");
}

namespace {

struct FieldError {
  std::string message;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (s.back() == sep) out.emplace_back();
  for (const auto& v : out)
    if (v.empty()) throw FieldError{"empty list element"};
  return out;
}

std::size_t to_size(const std::string& v) {
  std::size_t out = 0;
  if (!parse_integer(v, out)) throw FieldError{"expected a non-negative integer, got '" + v + "'"};
  return out;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  if (!parse_integer(v, out)) throw FieldError{"expected a non-negative integer, got '" + v + "'"};
  return out;
}

double to_real(const std::string& v) {
  double out = 0.0;
  if (!parse_double(v, out) || !std::isfinite(out)) throw FieldError{"expected a number, got '" + v + "'"};
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw FieldError{"expected true or false, got '" + v + "'"};
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += ',';
    out += fmt(items[k]);
  }
  return out;
}

std::string variant_name(AlgorithmVariant::Kind kind) {
  switch (kind) {
    case AlgorithmVariant::Kind::Averaging: return "averaging";
    case AlgorithmVariant::Kind::DecayingAveraging: return "decaying_averaging";
    case AlgorithmVariant::Kind::CensoredExchange: return "censored_exchange";
    case AlgorithmVariant::Kind::Custom: return "custom";
  }
  return "custom";
}

std::string law_name(InitialLaw::Kind kind) {
  switch (kind) {
    case InitialLaw::Kind::Explicit: return "explicit";
    case InitialLaw::Kind::UniformSupport: return "uniform";
    case InitialLaw::Kind::Skewed: return "skewed";
  }
  return "uniform";
}

std::string axis_name(SweepAxisKind kind) {
  switch (kind) {
    case SweepAxisKind::None: return "none";
    case SweepAxisKind::Schedule: return "schedule";
    case SweepAxisKind::Topology: return "topology";
    case SweepAxisKind::Opinions: return "opinions";
    case SweepAxisKind::Support: return "support";
    case SweepAxisKind::Skew: return "skew";
  }
  return "none";
}

ScheduleKind schedule_kind(const std::string& v) {
  if (v == "constant") return ScheduleKind::Constant;
  if (v == "harmonic") return ScheduleKind::Harmonic;
  if (v == "square") return ScheduleKind::Square;
  throw FieldError{"expected constant, harmonic or square, got '" + v + "'"};
}

using Setter = void (*)(ExperimentConfig&, const std::string&);

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"label", [](ExperimentConfig& c, const std::string& v) { c.label = v; }},
      {"topology",
       [](ExperimentConfig& c, const std::string& v) {
         try {
           c.topology.kind = parse_topology(v);
         } catch (const Error& e) {
           throw FieldError{e.detail()};
         }
       }},
      {"topology.require_connected",
       [](ExperimentConfig& c, const std::string& v) { c.topology.require_connected = to_bool(v); }},
      {"topology.resample", [](ExperimentConfig& c, const std::string& v) { c.resample_graph = to_bool(v); }},
      {"opinions", [](ExperimentConfig& c, const std::string& v) { c.opinions = to_size(v); }},
      {"initial",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "explicit")
           c.initial.kind = InitialLaw::Kind::Explicit;
         else if (v == "uniform")
           c.initial.kind = InitialLaw::Kind::UniformSupport;
         else if (v == "skewed")
           c.initial.kind = InitialLaw::Kind::Skewed;
         else
           throw FieldError{"expected explicit, uniform or skewed, got '" + v + "'"};
       }},
      {"initial.weights",
       [](ExperimentConfig& c, const std::string& v) {
         c.initial.weights.clear();
         for (const auto& s : split_list(v)) c.initial.weights.push_back(to_real(s));
       }},
      {"initial.support", [](ExperimentConfig& c, const std::string& v) { c.initial.support = to_size(v); }},
      {"initial.resample", [](ExperimentConfig& c, const std::string& v) { c.resample_opinions = to_bool(v); }},
      {"variant",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "averaging")
           c.variant.kind = AlgorithmVariant::Kind::Averaging;
         else if (v == "decaying_averaging")
           c.variant.kind = AlgorithmVariant::Kind::DecayingAveraging;
         else if (v == "censored_exchange")
           c.variant.kind = AlgorithmVariant::Kind::CensoredExchange;
         else
           throw FieldError{"expected averaging, decaying_averaging or censored_exchange, got '" + v + "'"};
       }},
      {"variant.weight", [](ExperimentConfig& c, const std::string& v) { c.variant.edge_weight = to_real(v); }},
      {"schedule", [](ExperimentConfig& c, const std::string& v) { c.schedule.kind = schedule_kind(v); }},
      {"schedule.c", [](ExperimentConfig& c, const std::string& v) { c.schedule.c = to_real(v); }},
      {"schedule.cap", [](ExperimentConfig& c, const std::string& v) { c.schedule.cap = to_real(v); }},
      {"schedule.uncapped", [](ExperimentConfig& c, const std::string& v) { c.schedule.uncapped = to_bool(v); }},
      {"horizon", [](ExperimentConfig& c, const std::string& v) { c.horizon = to_size(v); }},
      {"trials", [](ExperimentConfig& c, const std::string& v) { c.trials = to_size(v); }},
      {"seed", [](ExperimentConfig& c, const std::string& v) { c.base_seed = to_u64(v); }},
      {"stride",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "log")
           c.stride.kind = StrideKind::Logarithmic;
         else if (v == "linear")
           c.stride.kind = StrideKind::Linear;
         else
           throw FieldError{"expected log or linear, got '" + v + "'"};
       }},
      {"stride.factor", [](ExperimentConfig& c, const std::string& v) { c.stride.factor = to_real(v); }},
      {"stride.every", [](ExperimentConfig& c, const std::string& v) { c.stride.every = to_size(v); }},
      {"threshold", [](ExperimentConfig& c, const std::string& v) { c.threshold = to_real(v); }},
      {"rate.window",
       [](ExperimentConfig& c, const std::string& v) {
         const auto parts = split_list(v, ':');
         if (parts.size() != 2) throw FieldError{"expected lo:hi, got '" + v + "'"};
         c.rate_lo = to_size(parts[0]);
         c.rate_hi = to_size(parts[1]);
       }},
      {"trace.nodes",
       [](ExperimentConfig& c, const std::string& v) {
         c.trace_nodes.clear();
         for (const auto& s : split_list(v)) c.trace_nodes.push_back(to_size(s));
       }},
      {"sweep.axis",
       [](ExperimentConfig& c, const std::string& v) {
         for (auto k : {SweepAxisKind::None, SweepAxisKind::Schedule, SweepAxisKind::Topology,
                        SweepAxisKind::Opinions, SweepAxisKind::Support, SweepAxisKind::Skew}) {
           if (axis_name(k) == v) {
             c.sweep.kind = k;
             return;
           }
         }
         throw FieldError{"expected none, schedule, topology, opinions, support or skew, got '" + v + "'"};
       }},
      {"sweep.values", [](ExperimentConfig& c, const std::string& v) { c.sweep.values = split_list(v); }},
  };
  return table;
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& value) {
  for (const auto& [name, set] : setters()) {
    if (name == key) {
      set(c, value);
      return;
    }
  }
  throw FieldError{"unknown key"};
}

[[noreturn]] void config_error(const std::string& where, const std::string& field, const std::string& message) {
  std::string text = where.empty() ? std::string() : where + ": ";
  throw Error(ErrorCode::ConfigError, text + "field '" + field + "': " + message);
}

}  // namespace

StepSchedule parse_schedule(const std::string& text, StepSchedule base) {
  const auto colon = text.find(':');
  try {
    base.kind = schedule_kind(trim(text.substr(0, colon)));
    if (colon != std::string::npos) base.c = to_real(trim(text.substr(colon + 1)));
  } catch (const FieldError& e) {
    throw Error(ErrorCode::BadParameters, "schedule '" + text + "': " + e.message);
  }
  return base;
}

std::string schedule_label(const StepSchedule& schedule) {
  return std::string(to_string(schedule.kind)) + ":" + format_double(schedule.c);
}

KeyValues to_key_values(const ExperimentConfig& c) {
  KeyValues kv;
  kv.emplace_back("label", c.label);
  kv.emplace_back("topology", to_string(c.topology.kind));
  kv.emplace_back("topology.require_connected", from_bool(c.topology.require_connected));
  kv.emplace_back("topology.resample", from_bool(c.resample_graph));
  kv.emplace_back("opinions", std::to_string(c.opinions));
  kv.emplace_back("initial", law_name(c.initial.kind));
  kv.emplace_back("initial.weights", join(c.initial.weights, format_double));
  kv.emplace_back("initial.support", std::to_string(c.initial.support));
  kv.emplace_back("initial.resample", from_bool(c.resample_opinions));
  kv.emplace_back("variant", variant_name(c.variant.kind));
  kv.emplace_back("variant.weight", format_double(c.variant.edge_weight));
  kv.emplace_back("schedule", std::string(to_string(c.schedule.kind)));
  kv.emplace_back("schedule.c", format_double(c.schedule.c));
  kv.emplace_back("schedule.cap", format_double(c.schedule.cap));
  kv.emplace_back("schedule.uncapped", from_bool(c.schedule.uncapped));
  kv.emplace_back("horizon", std::to_string(c.horizon));
  kv.emplace_back("trials", std::to_string(c.trials));
  kv.emplace_back("seed", std::to_string(c.base_seed));
  kv.emplace_back("stride", c.stride.kind == StrideKind::Linear ? "linear" : "log");
  kv.emplace_back("stride.factor", format_double(c.stride.factor));
  kv.emplace_back("stride.every", std::to_string(c.stride.every));
  kv.emplace_back("threshold", format_double(c.threshold));
  kv.emplace_back("rate.window", std::to_string(c.rate_lo) + ":" + std::to_string(c.rate_hi));
  kv.emplace_back("trace.nodes", join(c.trace_nodes, [](std::size_t v) { return std::to_string(v); }));
  kv.emplace_back("sweep.axis", axis_name(c.sweep.kind));
  kv.emplace_back("sweep.values", join(c.sweep.values, [](const std::string& v) { return v; }));
  return kv;
}

ExperimentConfig from_key_values(const KeyValues& kv) {
  ExperimentConfig c;
  std::set<std::string> seen;
  for (const auto& [key, value] : kv) {
    if (!seen.insert(key).second) config_error("", key, "given more than once");
    try {
      apply(c, key, trim(value));
    } catch (const FieldError& e) {
      config_error("", key, e.message);
    }
  }
  validate(c);
  return c;
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : to_key_values(config)) out += key + " = " + value + "\n";
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigError, where + ": expected 'key = value', got '" + body + "'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!seen.insert(key).second) config_error(where, key, "given more than once");
    try {
      apply(c, key, value);
    } catch (const FieldError& e) {
      config_error(where, key, e.message);
    }
  }
  try {
    validate(c);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, source + ": " + e.detail());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate(const ExperimentConfig& c) {
  try {
    parse_topology(to_string(c.topology.kind));
  } catch (const Error& e) {
    config_error("", "topology", e.detail());
  }
  if (c.opinions == 0) config_error("", "opinions", "must be positive");
  switch (c.initial.kind) {
    case InitialLaw::Kind::Explicit:
      if (c.initial.weights.size() != c.opinions)
        config_error("", "initial.weights",
                     std::to_string(c.initial.weights.size()) + " weights for " + std::to_string(c.opinions) +
                         " opinions");
      try {
        make_distribution(c.initial.weights);
      } catch (const Error& e) {
        config_error("", "initial.weights", e.detail());
      }
      break;
    case InitialLaw::Kind::UniformSupport:
      if (c.initial.support > c.opinions) config_error("", "initial.support", "larger than opinions");
      break;
    case InitialLaw::Kind::Skewed:
      if (c.opinions < 3) config_error("", "opinions", "skewed law needs at least 3 opinions");
      break;
  }
  if (c.variant.kind == AlgorithmVariant::Kind::Custom) config_error("", "variant", "custom is not configurable");
  if (!(c.variant.edge_weight > 0.0)) config_error("", "variant.weight", "must be positive");
  if (!(c.schedule.c > 0.0)) config_error("", "schedule.c", "must be positive");
  if (!(c.schedule.cap > 0.0 && c.schedule.cap <= 1.0)) config_error("", "schedule.cap", "must lie in (0, 1]");
  if (c.horizon == 0) config_error("", "horizon", "must be at least 1");
  if (c.trials == 0) config_error("", "trials", "must be at least 1");
  if (c.stride.kind == StrideKind::Logarithmic && !(c.stride.factor > 1.0))
    config_error("", "stride.factor", "must exceed 1");
  if (c.stride.every == 0) config_error("", "stride.every", "must be at least 1");
  if (!(c.threshold > 0.0)) config_error("", "threshold", "must be positive");
  if (c.rate_lo >= c.rate_hi) config_error("", "rate.window", "lo must be below hi");
  const std::size_t n = node_count(c.topology);
  for (std::size_t v : c.trace_nodes)
    if (v >= n) config_error("", "trace.nodes", "node " + std::to_string(v) + " outside the graph");
  if (c.label.find('#') != std::string::npos) config_error("", "label", "must not contain '#'");
  if ((c.sweep.kind == SweepAxisKind::None) != c.sweep.values.empty())
    config_error("", "sweep.values", "values are required exactly when an axis is set");
  if (c.sweep.kind != SweepAxisKind::None)
    for (const auto& point : expand_sweep(c)) validate(point);
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config) {
  std::vector<ExperimentConfig> out;
  for (const std::string& value : config.sweep.values) {
    ExperimentConfig c = config;
    c.sweep = {};
    c.label = (config.label.empty() ? std::string() : config.label + " ") + axis_name(config.sweep.kind) + "=" + value;
    try {
      switch (config.sweep.kind) {
        case SweepAxisKind::None: break;
        case SweepAxisKind::Schedule: c.schedule = parse_schedule(value, config.schedule); break;
        case SweepAxisKind::Topology: c.topology.kind = parse_topology(value); break;
        case SweepAxisKind::Opinions:
          c.opinions = to_size(value);
          if (c.initial.kind == InitialLaw::Kind::Explicit)
            throw FieldError{"an explicit law cannot be resized by an opinions sweep"};
          if (c.initial.kind == InitialLaw::Kind::UniformSupport && c.initial.support == config.opinions)
            c.initial.support = 0;
          break;
        case SweepAxisKind::Support:
          c.initial.kind = InitialLaw::Kind::UniformSupport;
          c.initial.support = to_size(value);
          break;
        case SweepAxisKind::Skew:
          c.initial.kind = InitialLaw::Kind::Skewed;
          c.opinions = to_size(value);
          break;
      }
    } catch (const FieldError& e) {
      config_error("", "sweep.values", e.message);
    } catch (const Error& e) {
      config_error("", "sweep.values", e.detail());
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace socsamp
