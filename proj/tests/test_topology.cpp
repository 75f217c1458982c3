#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "socsamp/error.hpp"
#include "socsamp/topology.hpp"

using namespace socsamp;

namespace {

Graph make(TopologyKind kind, std::uint64_t seed = 1) {
  TopologySpec spec;
  spec.kind = kind;
  spec.seed = seed;
  return generate(spec);
}

Eigen::VectorXd eigen_oracle(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e).eigenvalues();
}

std::size_t zero_count(const std::vector<double>& lambda) {
  std::size_t k = 0;
  for (double l : lambda) k += std::abs(l) <= 1e-9 ? 1 : 0;
  return k;
}

}  // namespace

TEST_CASE("grid structure") {
  const Graph g = make(Grid{5, 5});
  CHECK(g.size() == 25);
  CHECK(g.edge_count() == 40);
  CHECK(max_degree(g) == 4);
  CHECK(is_connected(g));
  for (std::size_t r : {1u, 2u, 3u, 7u})
    for (std::size_t c : {1u, 4u, 6u}) CHECK(make(Grid{r, c}).edge_count() == r * (c - 1) + c * (r - 1));
}

TEST_CASE("star structure") {
  const Graph g = make(Star{100});
  CHECK(g.edge_count() == 99);
  CHECK(g.degree(0) == 99);
  for (std::size_t i = 1; i < 100; ++i) CHECK(g.degree(i) == 1);
  CHECK(max_degree(g) == 99);
  CHECK(is_connected(make(Star{4})));
  CHECK(max_degree(make(Star{1})) == 0);
}

TEST_CASE("complete Erdos-Renyi graph") {
  const Graph g = make(ErdosRenyi{100, 1.0});
  CHECK(g.edge_count() == 4950);
}

TEST_CASE("Erdos-Renyi mean edge count") {
  const double mean_target = 0.6 * 4950;
  const double sigma = std::sqrt(4950 * 0.6 * 0.4);
  double total = 0.0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) total += static_cast<double>(make(ErdosRenyi{100, 0.6}, s).edge_count());
  CHECK(std::abs(total / seeds - mean_target) <= 3 * sigma / std::sqrt(double(seeds)));
}

TEST_CASE("preferential attachment") {
  const Graph g = make(PreferentialAttachment{100, 3});
  CHECK(g.size() == 100);
  // 3-clique seed plus three edges per later node.
  CHECK(g.edge_count() == 3 + 3 * 97);
  CHECK(is_connected(g));
  for (std::size_t i = 3; i < 100; ++i) CHECK(g.degree(i) >= 3);
}

TEST_CASE("Watts-Strogatz keeps node and edge counts") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = make(WattsStrogatz{10, 10, 0.1}, seed);
    CHECK(g.size() == 100);
    CHECK(g.edge_count() == 180);
    CHECK(is_connected(g));
  }
  CHECK(make(WattsStrogatz{4, 4, 0.0}) == make(Grid{4, 4}));
  CHECK_FALSE(make(WattsStrogatz{10, 10, 0.5}, 3) == make(Grid{10, 10}));
}

TEST_CASE("random generation is a pure function of the seed") {
  CHECK(make(ErdosRenyi{50, 0.2}, 8) == make(ErdosRenyi{50, 0.2}, 8));
  CHECK(make(PreferentialAttachment{60, 3}, 8) == make(PreferentialAttachment{60, 3}, 8));
  CHECK_FALSE(make(ErdosRenyi{50, 0.2}, 8) == make(ErdosRenyi{50, 0.2}, 9));
}

TEST_CASE("unreachable connectivity gives up") {
  TopologySpec spec{ErdosRenyi{30, 0.0}, 1, true};
  try {
    generate(spec);
    FAIL("expected DisconnectedAfterRetries");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisconnectedAfterRetries);
  }
  spec.require_connected = false;
  CHECK(component_count(generate(spec)) == 30);
}

TEST_CASE("bad parameters") {
  auto code = [](TopologyKind kind) {
    try {
      make(kind);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::FormatError;
  };
  CHECK(code(Grid{0, 3}) == ErrorCode::BadParameters);
  CHECK(code(Star{0}) == ErrorCode::BadParameters);
  CHECK(code(ErdosRenyi{10, 1.5}) == ErrorCode::BadParameters);
  CHECK(code(WattsStrogatz{3, 3, -0.1}) == ErrorCode::BadParameters);
  CHECK(code(PreferentialAttachment{10, 0}) == ErrorCode::BadParameters);
  try {
    Graph(3, {{0, 0}});
    FAIL("self-loop accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadParameters);
  }
}

TEST_CASE("laplacian") {
  const Matrix l = laplacian(make(Grid{1, 2}));
  CHECK(l(0, 0) == 1);
  CHECK(l(0, 1) == -1);
  CHECK(l(1, 0) == -1);
  CHECK(l(1, 1) == 1);
  CHECK(laplacian(Graph(3, {})).max_abs() == 0.0);

  const Matrix lg = laplacian(make(Grid{5, 5}));
  for (std::size_t i = 0; i < 25; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 25; ++j) sum += lg(i, j);
    CHECK(sum == 0.0);
  }
  CHECK(lg == lg.transpose());
}

TEST_CASE("zero eigenvalues count components") {
  const Graph one = make(Grid{3, 3});
  const Graph two(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
  const Graph three(5, {{0, 1}, {2, 3}});
  CHECK(zero_count(spectrum(laplacian(one))) == 1);
  CHECK(zero_count(spectrum(laplacian(two))) == 2);
  CHECK(zero_count(spectrum(laplacian(three))) == 3);
  CHECK(component_count(two) == 2);
  CHECK(component_count(three) == 3);
  CHECK_FALSE(is_connected(Graph(2, {})));
  CHECK(spectrum(laplacian(one)).front() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("spectrum small cases") {
  const auto id = spectrum(Matrix::identity(3));
  CHECK(id == std::vector<double>{1, 1, 1});
  const auto path = spectrum(laplacian(make(Grid{1, 2})));
  CHECK(path[0] == doctest::Approx(0.0));
  CHECK(path[1] == doctest::Approx(2.0));
  Matrix asym = Matrix::identity(2);
  asym(0, 1) = 1.0;
  try {
    spectrum(asym);
    FAIL("expected NotSymmetric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSymmetric);
  }
}

TEST_CASE("spectrum agrees with an independent eigensolver") {
  std::vector<Matrix> cases;
  for (TopologyKind kind : std::vector<TopologyKind>{Grid{5, 5}, Grid{3, 7}, Star{30},
                                                     PreferentialAttachment{40, 3}, WattsStrogatz{6, 6, 0.1}}) {
    const Graph g = make(kind, 4);
    cases.push_back(laplacian(g) * (-1.0 / static_cast<double>(max_degree(g) + 1)));
  }
  Rng rng(12);
  Matrix dense(12, 12);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j <= i; ++j) dense(i, j) = dense(j, i) = rng.uniform() * 2 - 1;
  cases.push_back(dense);

  for (const Matrix& m : cases) {
    const auto ours = spectrum(m);
    const Eigen::VectorXd ref = eigen_oracle(m);
    REQUIRE(ours.size() == static_cast<std::size_t>(ref.size()));
    for (std::size_t k = 0; k < ours.size(); ++k) CHECK(std::abs(ours[k] - ref(k)) <= 1e-9);
  }
}

TEST_CASE("grid mean-dynamics matrix is negative semidefinite with a simple zero") {
  const Graph g = make(Grid{5, 5});
  const auto lambda = spectrum(laplacian(g) * (-1.0 / 5.0));
  CHECK(zero_count(lambda) == 1);
  for (double l : lambda) CHECK(l <= 1e-12);
}

TEST_CASE("topology text round trip") {
  for (const char* text : {"grid:5x5", "star:100", "erdos_renyi:100:0.6", "preferential_attachment:100:3",
                           "watts_strogatz:10x10:0.1"})
    CHECK(to_string(parse_topology(text)) == text);
  CHECK(parse_topology("er:10:0.5") == TopologyKind{ErdosRenyi{10, 0.5}});
  CHECK(parse_topology("pa:20:2") == TopologyKind{PreferentialAttachment{20, 2}});
  CHECK(parse_topology("ws:3x4:0.2") == TopologyKind{WattsStrogatz{3, 4, 0.2}});
  for (const char* bad : {"grid:5", "ring:4", "star:x", "er:10", "grid:0x3"}) {
    try {
      parse_topology(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadParameters);
    }
  }
}

TEST_CASE("edge list round trip") {
  const Graph g = make(WattsStrogatz{5, 6, 0.2}, 3);
  std::stringstream io;
  write_edge_list(io, g);
  CHECK(read_edge_list(io) == g);

  std::istringstream bad("3 2\n0 1\n");
  try {
    read_edge_list(bad);
    FAIL("truncated list accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatError);
  }
}
