#include "socsamp/topology.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "socsamp/error.hpp"
#include "socsamp/format.hpp"

namespace socsamp {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n) {
  for (auto& [a, b] : edges) {
    if (a >= n || b >= n)
      throw Error(ErrorCode::BadParameters,
                  "edge (" + std::to_string(a) + ", " + std::to_string(b) + ") outside " + std::to_string(n) + " nodes");
    if (a == b) throw Error(ErrorCode::BadParameters, "self-loop at node " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw Error(ErrorCode::BadParameters, "duplicate edge");
  edges_ = std::move(edges);

  std::vector<std::size_t> degree(n, 0);
  for (const auto& [a, b] : edges_) {
    ++degree[a];
    ++degree[b];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  neighbors_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges_) {
    neighbors_[fill[a]++] = b;
    neighbors_[fill[b]++] = a;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
    max_degree_ = std::max(max_degree_, degree[i]);
  }
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

Matrix Graph::adjacency() const {
  Matrix g(n_, n_);
  for (const auto& [a, b] : edges_) {
    g(a, b) = 1.0;
    g(b, a) = 1.0;
  }
  return g;
}

namespace {

std::vector<Edge> grid_edges(std::size_t rows, std::size_t cols) {
  std::vector<Edge> edges;
  edges.reserve(rows * (cols - 1) + cols * (rows - 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t id = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(id, id + 1);
      if (r + 1 < rows) edges.emplace_back(id, id + cols);
    }
  }
  return edges;
}

Graph erdos_renyi(const ErdosRenyi& p, Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = i + 1; j < p.n; ++j)
      if (rng.bernoulli(p.p)) edges.emplace_back(i, j);
  return Graph(p.n, std::move(edges));
}

// Seed clique, then each new vertex links to m_new distinct earlier vertices
// drawn one at a time with probability proportional to degree.
Graph preferential_attachment(const PreferentialAttachment& p, Rng& rng) {
  const std::size_t seed_size = std::max<std::size_t>(3, p.m_new);
  std::vector<Edge> edges;
  std::vector<std::uint64_t> degree(p.n, 0);
  for (std::size_t i = 0; i < seed_size; ++i) {
    for (std::size_t j = i + 1; j < seed_size; ++j) {
      edges.emplace_back(i, j);
      ++degree[i];
      ++degree[j];
    }
  }
  std::vector<bool> taken(p.n, false);
  std::vector<std::size_t> chosen;
  for (std::size_t v = seed_size; v < p.n; ++v) {
    chosen.clear();
    for (std::size_t k = 0; k < p.m_new; ++k) {
      std::uint64_t total = 0;
      for (std::size_t u = 0; u < v; ++u)
        if (!taken[u]) total += degree[u];
      std::uint64_t r = rng.below(total);
      std::size_t pick = 0;
      for (std::size_t u = 0; u < v; ++u) {
        if (taken[u]) continue;
        if (r < degree[u]) {
          pick = u;
          break;
        }
        r -= degree[u];
      }
      taken[pick] = true;
      chosen.push_back(pick);
    }
    for (std::size_t u : chosen) {
      taken[u] = false;
      edges.emplace_back(u, v);
      ++degree[u];
      ++degree[v];
    }
  }
  return Graph(p.n, std::move(edges));
}

// Grid whose edges are independently rewired: the lower endpoint is kept and
// the other replaced by a uniform node that is neither it nor a neighbor.
Graph watts_strogatz(const WattsStrogatz& p, Rng& rng) {
  const std::size_t n = p.rows * p.cols;
  std::vector<Edge> edges = grid_edges(p.rows, p.cols);
  std::vector<std::set<std::size_t>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  for (auto& e : edges) {
    if (!rng.bernoulli(p.rewire_p)) continue;
    const std::size_t u = e.first;
    if (adj[u].size() + 1 >= n) continue;
    std::size_t w = 0;
    do {
      w = rng.below(n);
    } while (w == u || adj[u].count(w) != 0);
    adj[u].erase(e.second);
    adj[e.second].erase(u);
    adj[u].insert(w);
    adj[w].insert(u);
    e.second = w;
  }
  return Graph(n, std::move(edges));
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

void validate(const TopologyKind& kind) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::BadParameters, what); };
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Grid>) {
          if (k.rows == 0 || k.cols == 0) bad("grid dimensions must be positive");
        } else if constexpr (std::is_same_v<K, Star>) {
          if (k.n == 0) bad("star needs at least one node");
        } else if constexpr (std::is_same_v<K, ErdosRenyi>) {
          if (k.n == 0) bad("erdos_renyi needs at least one node");
          if (!probability(k.p)) bad("erdos_renyi p must lie in [0, 1]");
        } else if constexpr (std::is_same_v<K, PreferentialAttachment>) {
          if (k.m_new == 0) bad("preferential_attachment m_new must be positive");
          if (k.n < std::max<std::size_t>(3, k.m_new)) bad("preferential_attachment n smaller than its seed clique");
        } else {
          if (k.rows == 0 || k.cols == 0) bad("watts_strogatz dimensions must be positive");
          if (!probability(k.rewire_p)) bad("watts_strogatz rewire_p must lie in [0, 1]");
        }
      },
      kind);
}

}  // namespace

std::size_t node_count(const TopologySpec& spec) {
  return std::visit(
      [](const auto& k) -> std::size_t {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Grid> || std::is_same_v<K, WattsStrogatz>)
          return k.rows * k.cols;
        else
          return k.n;
      },
      spec.kind);
}

bool is_random(const TopologySpec& spec) {
  return !std::holds_alternative<Grid>(spec.kind) && !std::holds_alternative<Star>(spec.kind);
}

std::string to_string(const TopologyKind& kind) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Grid>)
          return "grid:" + std::to_string(k.rows) + "x" + std::to_string(k.cols);
        else if constexpr (std::is_same_v<K, Star>)
          return "star:" + std::to_string(k.n);
        else if constexpr (std::is_same_v<K, ErdosRenyi>)
          return "erdos_renyi:" + std::to_string(k.n) + ":" + format_double(k.p);
        else if constexpr (std::is_same_v<K, PreferentialAttachment>)
          return "preferential_attachment:" + std::to_string(k.n) + ":" + std::to_string(k.m_new);
        else
          return "watts_strogatz:" + std::to_string(k.rows) + "x" + std::to_string(k.cols) + ":" +
                 format_double(k.rewire_p);
      },
      kind);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

TopologyKind parse_topology(const std::string& text) {
  const auto parts = split(text, ':');
  auto fail = [&]() -> TopologyKind {
    throw Error(ErrorCode::BadParameters, "cannot parse topology '" + text + "'");
  };
  auto size = [&](const std::string& s) {
    std::size_t v = 0;
    if (!parse_integer(s, v)) fail();
    return v;
  };
  auto real = [&](const std::string& s) {
    double v = 0;
    if (!parse_double(s, v)) fail();
    return v;
  };
  auto dims = [&](const std::string& s) {
    const auto rc = split(s, 'x');
    if (rc.size() != 2) fail();
    return std::pair{size(rc[0]), size(rc[1])};
  };
  if (parts.empty()) return fail();
  const std::string& name = parts[0];
  TopologyKind kind;
  if (name == "grid" && parts.size() == 2) {
    auto [r, c] = dims(parts[1]);
    kind = Grid{r, c};
  } else if (name == "star" && parts.size() == 2) {
    kind = Star{size(parts[1])};
  } else if ((name == "erdos_renyi" || name == "er") && parts.size() == 3) {
    kind = ErdosRenyi{size(parts[1]), real(parts[2])};
  } else if ((name == "preferential_attachment" || name == "pa") && (parts.size() == 2 || parts.size() == 3)) {
    kind = PreferentialAttachment{size(parts[1]), parts.size() == 3 ? size(parts[2]) : 3};
  } else if ((name == "watts_strogatz" || name == "ws") && (parts.size() == 2 || parts.size() == 3)) {
    auto [r, c] = dims(parts[1]);
    kind = WattsStrogatz{r, c, parts.size() == 3 ? real(parts[2]) : 0.1};
  } else {
    return fail();
  }
  validate(kind);
  return kind;
}

Graph generate(const TopologySpec& spec, Rng& rng) {
  validate(spec.kind);
  if (const auto* g = std::get_if<Grid>(&spec.kind)) return Graph(g->rows * g->cols, grid_edges(g->rows, g->cols));
  if (const auto* s = std::get_if<Star>(&spec.kind)) {
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < s->n; ++i) edges.emplace_back(0, i);
    return Graph(s->n, std::move(edges));
  }
  for (int attempt = 0; attempt < kMaxConnectRetries; ++attempt) {
    Graph g;
    if (const auto* er = std::get_if<ErdosRenyi>(&spec.kind))
      g = erdos_renyi(*er, rng);
    else if (const auto* pa = std::get_if<PreferentialAttachment>(&spec.kind))
      g = preferential_attachment(*pa, rng);
    else
      g = watts_strogatz(std::get<WattsStrogatz>(spec.kind), rng);
    if (!spec.require_connected || is_connected(g)) return g;
  }
  throw Error(ErrorCode::DisconnectedAfterRetries,
              to_string(spec.kind) + " stayed disconnected after " + std::to_string(kMaxConnectRetries) + " draws");
}

Graph generate(const TopologySpec& spec) {
  Rng rng(spec.seed);
  return generate(spec, rng);
}

Matrix laplacian(const Graph& g) {
  Matrix l(g.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) l(i, i) = static_cast<double>(g.degree(i));
  for (const auto& [a, b] : g.edges()) {
    l(a, b) = -1.0;
    l(b, a) = -1.0;
  }
  return l;
}

std::size_t max_degree(const Graph& g) { return g.max_degree(); }

std::size_t component_count(const Graph& g) {
  std::vector<bool> seen(g.size(), false);
  std::size_t components = 0;
  std::queue<std::size_t> frontier;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = true;
    frontier.push(s);
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t v : g.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = true;
          frontier.push(v);
        }
      }
    }
  }
  return components;
}

bool is_connected(const Graph& g) { return component_count(g) <= 1; }

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.size() << ' ' << g.edge_count() << '\n';
  for (const auto& [a, b] : g.edges()) out << a << ' ' << b << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing edge list");
}

Graph read_edge_list(std::istream& in) {
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m)) throw Error(ErrorCode::FormatError, "edge list header must be 'n m'");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t a = 0, b = 0;
    if (!(in >> a >> b))
      throw Error(ErrorCode::FormatError, "edge list ended after " + std::to_string(k) + " of " + std::to_string(m) + " edges");
    edges.emplace_back(a, b);
  }
  return Graph(n, std::move(edges));
}

}  // namespace socsamp
