#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "socsamp/matrix.hpp"
#include "socsamp/rng.hpp"

namespace socsamp {

using Edge = std::pair<std::size_t, std::size_t>;

/**
 * Undirected simple graph on nodes 0..n-1.
 *
 * Edges are stored normalized (first < second) and sorted. Neighbor lists
 * are kept in CSR form; per-edge weights elsewhere in the library are laid
 * out in the same order, indexed by `slot(i, k)` for the k-th neighbor of i.
 */
class Graph {
 public:
  Graph() = default;
  /// Throws BadParameters on self-loops, duplicate edges or out-of-range nodes.
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const std::size_t> neighbors(std::size_t i) const {
    return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::size_t max_degree() const noexcept { return max_degree_; }

  /// Total number of directed neighbor slots (2 * edge_count).
  std::size_t slot_count() const noexcept { return neighbors_.size(); }
  std::size_t slot(std::size_t i, std::size_t k) const { return offsets_[i] + k; }
  std::size_t first_slot(std::size_t i) const { return offsets_[i]; }

  bool has_edge(std::size_t i, std::size_t j) const;

  Matrix adjacency() const;

  bool operator==(const Graph& other) const { return n_ == other.n_ && edges_ == other.edges_; }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> neighbors_;
  std::size_t max_degree_ = 0;
};

struct Grid {
  std::size_t rows = 1;
  std::size_t cols = 1;
  bool operator==(const Grid&) const = default;
};

struct Star {
  std::size_t n = 1;
  bool operator==(const Star&) const = default;
};

struct ErdosRenyi {
  std::size_t n = 1;
  double p = 0.6;
  bool operator==(const ErdosRenyi&) const = default;
};

struct PreferentialAttachment {
  std::size_t n = 3;
  std::size_t m_new = 3;
  bool operator==(const PreferentialAttachment&) const = default;
};

struct WattsStrogatz {
  std::size_t rows = 1;
  std::size_t cols = 1;
  double rewire_p = 0.1;
  bool operator==(const WattsStrogatz&) const = default;
};

using TopologyKind = std::variant<Grid, Star, ErdosRenyi, PreferentialAttachment, WattsStrogatz>;

struct TopologySpec {
  TopologyKind kind = Grid{};
  std::uint64_t seed = 0;
  /// Random models are resampled until connected (up to kMaxConnectRetries).
  bool require_connected = true;

  bool operator==(const TopologySpec&) const = default;
};

inline constexpr int kMaxConnectRetries = 1000;

std::size_t node_count(const TopologySpec& spec);
bool is_random(const TopologySpec& spec);

/// Compact textual form, e.g. "grid:5x5", "star:100", "erdos_renyi:100:0.6",
/// "preferential_attachment:100:3", "watts_strogatz:10x10:0.1".
std::string to_string(const TopologyKind& kind);
/// Inverse of to_string; throws BadParameters on malformed input.
TopologyKind parse_topology(const std::string& text);

/// Throws BadParameters on invalid parameters and DisconnectedAfterRetries
/// when a connected instance could not be drawn.
Graph generate(const TopologySpec& spec, Rng& rng);
Graph generate(const TopologySpec& spec);

Matrix laplacian(const Graph& g);
std::size_t max_degree(const Graph& g);
bool is_connected(const Graph& g);
std::size_t component_count(const Graph& g);

/// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations
/// until the off-diagonal Frobenius norm falls below `tol`.
/// Throws NotSymmetric.
std::vector<double> spectrum(const Matrix& m, double tol = 1e-10);

/// Edge-list text: "n m" header then one 0-indexed "i j" pair per line.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

}  // namespace socsamp
