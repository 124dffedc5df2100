#include <doctest.h>

#include <random>

#include "disped/graph.hpp"
#include "test_support.hpp"

using namespace disped;

TEST_CASE("laplacian of a single vertex") {
  WeightedDigraph g;
  g.ids = {1};
  const LaplacianBundle b = build_laplacian(g);
  CHECK(b.L.rows() == 1);
  CHECK(b.L(0, 0) == 0.0);
  CHECK(b.is_strongly_connected);
  CHECK(b.is_weight_balanced);
  CHECK(b.lambda2_sym == 0.0);  // sentinel for the degenerate case
}

TEST_CASE("laplacian rejects an empty graph") {
  WeightedDigraph g;
  CHECK_THROWS_AS(build_laplacian(g), std::invalid_argument);
}

TEST_CASE("two-vertex bidirectional graph: closed form") {
  WeightedDigraph g;
  g.ids = {1, 2};
  g.edges = {{1, 2, 0.1}, {2, 1, 0.1}};
  const LaplacianBundle b = build_laplacian(g);
  CHECK(b.L(0, 0) == doctest::Approx(0.1));
  CHECK(b.L(0, 1) == doctest::Approx(-0.1));
  CHECK(b.L(1, 0) == doctest::Approx(-0.1));
  CHECK(b.L(1, 1) == doctest::Approx(0.1));
  CHECK(b.is_strongly_connected);
  CHECK(b.is_weight_balanced);
  // eigenvalues of L + L^T are {0, 0.4}; of L^T L are {0, 0.04}
  CHECK(b.lambda2_sym == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(b.lambda_max_ltl == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("benchmark digraph G: structure and spectra") {
  const WeightedDigraph g = table1_graph(Table1Graph::G);
  CHECK(g.order() == 54);
  CHECK(g.edges.size() == 54 * 9);  // 1 cycle edge + 8 chord incidences per vertex

  const LaplacianBundle b = build_laplacian(g);
  CHECK(b.is_strongly_connected);
  CHECK(b.is_weight_balanced);
  for (int i = 0; i < 54; ++i) CHECK(b.L(i, i) == doctest::Approx(0.9).epsilon(1e-12));

  // Cross-check the dense eigensolve against power iteration.
  const Eigen::MatrixXd S = b.L + b.L.transpose();
  CHECK(b.lambda2_sym ==
        doctest::Approx(disped::testing::power_lambda2_sym(S)).epsilon(1e-6));
  CHECK(b.lambda_max_ltl ==
        doctest::Approx(disped::testing::power_lambda_max(b.L.transpose() * b.L))
            .epsilon(1e-6));
}

TEST_CASE("benchmark variants") {
  const WeightedDigraph ghat = table1_graph(Table1Graph::Ghat);
  const LaplacianBundle bhat = build_laplacian(ghat);
  CHECK(bhat.is_weight_balanced);  // undirected graphs are weight-balanced
  CHECK(bhat.is_strongly_connected);

  const WeightedDigraph gi = table1_graph(Table1Graph::Gi);
  CHECK(gi.order() == 50);
  CHECK(!gi.has_vertex(4));
  CHECK(!gi.has_vertex(45));
  const LaplacianBundle bi = build_laplacian(gi);
  CHECK(bi.is_weight_balanced);
  CHECK(bi.is_strongly_connected);

  const WeightedDigraph gf = table1_graph(Table1Graph::Gf);
  CHECK(gf.order() == 51);
  CHECK(!gf.has_vertex(27));

  CHECK(table1_from_name("Ghat") == Table1Graph::Ghat);
  CHECK_THROWS(table1_from_name("nope"));
}

TEST_CASE("remove and add vertices") {
  const WeightedDigraph ghat = table1_graph(Table1Graph::Ghat);
  const int drop[] = {4, 11, 25, 45};
  const WeightedDigraph gi = remove_vertices(ghat, drop);
  CHECK(graphs_equal(gi, table1_graph(Table1Graph::Gi)));

  // Re-adding a vertex with its original edge set restores the graph.
  const int drop1[] = {11};
  const WeightedDigraph without = remove_vertices(ghat, drop1);
  std::vector<GraphEdge> incident;
  for (const GraphEdge& e : ghat.edges)
    if (e.i == 11 || e.j == 11) incident.push_back(e);
  const WeightedDigraph restored = add_vertex(without, 11, incident);
  CHECK(graphs_equal(restored, ghat));

  // Removing a cut vertex of a path graph disconnects it.
  WeightedDigraph path;
  path.ids = {1, 2, 3};
  path.edges = {{1, 2, 1.0}, {2, 1, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}};
  const int cut[] = {2};
  const WeightedDigraph split = remove_vertices(path, cut);
  CHECK_FALSE(build_laplacian(split).is_strongly_connected);

  const int all[] = {1, 2, 3};
  CHECK_THROWS_AS(remove_vertices(path, all), std::invalid_argument);
}

TEST_CASE("spectral bounds: closed forms") {
  CHECK(spectral_lower_bound({54, 0.9, 0.1}) == doctest::Approx(4.0 * 0.1 / 2916.0));
  CHECK(spectral_lower_bound({2, 1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(spectral_upper_bound({54, 0.9, 0.1}) == doctest::Approx(174.96));
  CHECK(spectral_upper_bound({1, 0.0, 1.0}) == doctest::Approx(0.0));
}

TEST_CASE("spectral bounds bracket the true spectra") {
  std::mt19937 rng(31);
  std::vector<WeightedDigraph> graphs = {table1_graph(Table1Graph::G),
                                         table1_graph(Table1Graph::Ghat),
                                         table1_graph(Table1Graph::Gi),
                                         table1_graph(Table1Graph::Gf)};
  for (int k = 0; k < 6; ++k)
    graphs.push_back(disped::testing::random_balanced_digraph(rng, 3 + k));

  for (const WeightedDigraph& g : graphs) {
    const LaplacianBundle b = build_laplacian(g);
    REQUIRE(b.is_strongly_connected);
    REQUIRE(b.is_weight_balanced);
    const GraphBounds bounds = consensus_bounds(g);
    CHECK(spectral_lower_bound(bounds) <= b.lambda2_sym + 1e-12);
    CHECK(spectral_upper_bound(bounds) >= b.lambda_max_ltl - 1e-12);
  }
}

TEST_CASE("consensus bounds equal the global scan") {
  const WeightedDigraph g = table1_graph(Table1Graph::G);
  const GraphBounds b = consensus_bounds(g);
  CHECK(b.n_max == 54);
  CHECK(b.d_max_out == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(b.a_min == doctest::Approx(0.1));

  // Two-cycle with distinct weights: a_min is the smaller one.
  WeightedDigraph two;
  two.ids = {1, 2};
  two.edges = {{1, 2, 0.1}, {2, 1, 0.3}};
  const GraphBounds b2 = consensus_bounds(two);
  CHECK(b2.a_min == doctest::Approx(0.1));
  CHECK(b2.n_max == 2);

  // Single vertex keeps its own local values.
  WeightedDigraph one;
  one.ids = {1};
  const LocalBoundsInput local[] = {{7, 2.5, 0.4}};
  const GraphBounds b1 = consensus_bounds(one, local);
  CHECK(b1.n_max == 7);
  CHECK(b1.d_max_out == doctest::Approx(2.5));
  CHECK(b1.a_min == doctest::Approx(0.4));

  // Random graphs: fixed point equals the direct max/min scan.
  std::mt19937 rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const WeightedDigraph rg = disped::testing::random_balanced_digraph(rng, 3 + trial % 5);
    const GraphBounds rb = consensus_bounds(rg);
    double dmax = 0.0, amin = std::numeric_limits<double>::infinity();
    std::vector<double> dout(rg.order(), 0.0);
    for (const GraphEdge& e : rg.edges) {
      dout[rg.index_of(e.i)] += e.w;
      amin = std::min(amin, e.w);
    }
    for (double d : dout) dmax = std::max(dmax, d);
    CHECK(rb.n_max == rg.order());
    CHECK(rb.d_max_out == doctest::Approx(dmax).epsilon(1e-12));
    CHECK(rb.a_min == doctest::Approx(amin));
  }

  WeightedDigraph disconnected;
  disconnected.ids = {1, 2};
  disconnected.edges = {{1, 2, 1.0}};
  CHECK_THROWS_AS(consensus_bounds(disconnected), std::invalid_argument);
}

TEST_CASE("row sums cancel by construction") {
  for (Table1Graph which :
       {Table1Graph::G, Table1Graph::Ghat, Table1Graph::Gi, Table1Graph::Gf}) {
    const WeightedDigraph g = table1_graph(which);
    const LaplacianBundle b = build_laplacian(g);
    const int n = g.order();
    for (int i = 0; i < n; ++i) {
      double off = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) off += b.L(i, j);
      CHECK(b.L(i, i) == -off);  // exact: diagonal assembled from this sum
    }
    CHECK((b.L * Eigen::VectorXd::Ones(n)).lpNorm<Eigen::Infinity>() <= 1e-14);
  }
}

TEST_CASE("balance detection against a deliberately unbalanced digraph") {
  WeightedDigraph g;
  g.ids = {1, 2, 3};
  g.edges = {{1, 2, 1.0}, {2, 3, 2.0}, {3, 1, 1.0}};  // unequal cycle weights
  const LaplacianBundle b = build_laplacian(g);
  CHECK(b.is_strongly_connected);
  CHECK_FALSE(b.is_weight_balanced);
}

TEST_CASE("quadratic-form lower bound (spectral gap inequality)") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (Table1Graph which :
       {Table1Graph::G, Table1Graph::Ghat, Table1Graph::Gi, Table1Graph::Gf}) {
    const WeightedDigraph g = table1_graph(which);
    const LaplacianBundle b = build_laplacian(g);
    const Eigen::MatrixXd S = b.L + b.L.transpose();
    const int n = g.order();
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x(i) = dist(rng);
      const Eigen::VectorXd centered = x.array() - x.mean();
      CHECK(x.dot(S * x) >= b.lambda2_sym * centered.squaredNorm() - 1e-9);
    }
  }
}

TEST_CASE("graph json round trip") {
  const WeightedDigraph g = table1_graph(Table1Graph::Gf);
  const WeightedDigraph back = graph_from_json(graph_to_json(g));
  CHECK(graphs_equal(g, back));

  WeightedDigraph small;
  small.ids = {1, 2};
  small.edges = {{1, 2, 0.5}, {2, 1, 0.5}};
  CHECK(graphs_equal(small, graph_from_json(graph_to_json(small))));
}

TEST_CASE("graph validation catches malformed inputs") {
  WeightedDigraph g;
  g.ids = {1, 2};
  g.edges = {{1, 1, 1.0}};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // self-loop
  g.edges = {{1, 2, -1.0}};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // non-positive weight
  g.edges = {{1, 3, 1.0}};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // endpoint outside
  g.edges = {{1, 2, 1.0}, {1, 2, 2.0}};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // duplicate edge
}
