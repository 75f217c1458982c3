#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "socsamp/error.hpp"
#include "socsamp/format.hpp"
#include "socsamp/protocol.hpp"

namespace socsamp {

namespace {
constexpr const char* kMagic = "socsamp-trajectory";
constexpr int kVersion = 1;
}  // namespace

void write_trajectory_header(std::ostream& out, std::size_t nodes, std::size_t opinions) {
  out << kMagic << ' ' << kVersion << ' ' << nodes << ' ' << opinions << '\n';
}

void write_checkpoint(std::ostream& out, const NetworkState& state, const Rng& rng) {
  const RngPosition pos = rng.position();
  out << state.t << ' ' << pos.seed << ' ' << pos.draws;
  for (double x : state.q.data()) out << ' ' << format_double(x);
  out << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing checkpoint");
}

std::vector<Checkpoint> read_trajectory(std::istream& in) {
  std::string magic;
  int version = 0;
  std::size_t n = 0, m = 0;
  if (!(in >> magic >> version >> n >> m) || magic != kMagic || version != kVersion)
    throw Error(ErrorCode::FormatError, "missing or unsupported trajectory header");
  std::vector<Checkpoint> out;
  std::string line;
  std::getline(in, line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Checkpoint cp{0, Matrix(n, m), {}};
    std::string token;
    auto next = [&]() -> const std::string& {
      if (!(fields >> token)) throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + " is truncated");
      return token;
    };
    if (!parse_integer(next(), cp.t) || !parse_integer(next(), cp.rng.seed) || !parse_integer(next(), cp.rng.draws))
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": bad round or stream position");
    for (double& x : cp.q.data())
      if (!parse_double(next(), x))
        throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": bad matrix entry '" + token + "'");
    if (fields >> token) throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + " has extra fields");
    out.push_back(std::move(cp));
  }
  return out;
}

}  // namespace socsamp
