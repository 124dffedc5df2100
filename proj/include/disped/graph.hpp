#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace disped {

/// Directed edge (i, j, w): unit j can send information to unit i.
/// The weight is stored in the adjacency matrix at (row i, column j),
/// so the weighted out-degree of i is the i-th row sum.
struct GraphEdge {
  int i = 0;
  int j = 0;
  double w = 0.0;
};

/// Weighted digraph over explicitly labelled vertices. Labels are positive
/// unit ids (1..n for freshly built graphs); structural edits keep the
/// surviving labels so unit identity is stable across add/remove events.
struct WeightedDigraph {
  std::vector<int> ids;          // sorted, unique, positive
  std::vector<GraphEdge> edges;  // weights > 0, no self-loops, endpoints in ids

  int order() const { return static_cast<int>(ids.size()); }
  bool has_vertex(int id) const;
  int index_of(int id) const;  // position in sorted ids, -1 if absent

  /// Throws std::invalid_argument when a type invariant is broken.
  void validate() const;
};

bool graphs_equal(const WeightedDigraph& a, const WeightedDigraph& b);

/// Laplacian L = D_out - A plus the cached spectral quantities the parameter
/// conditions need. Recomputed once per topology change.
struct LaplacianBundle {
  Eigen::MatrixXd L;            // over sorted ids
  double lambda2_sym = 0.0;     // smallest non-zero eigenvalue of L + L^T (0 for n == 1)
  double lambda_max_ltl = 0.0;  // largest eigenvalue of L^T L
  bool is_strongly_connected = false;
  bool is_weight_balanced = false;
};

LaplacianBundle build_laplacian(const WeightedDigraph& g);

enum class Table1Graph { G, Ghat, Gi, Gf };

/// The four 54-vertex benchmark digraphs: G is a directed cycle plus four
/// bidirectional chord families at offsets 5, 10, 15, 20, all weights 0.1;
/// Ghat makes the cycle undirected; Gi drops {4,11,25,45}; Gf drops {4,25,27}.
WeightedDigraph table1_graph(Table1Graph which);
Table1Graph table1_from_name(std::string_view name);  // "G" "Ghat" "Gi" "Gf"
const char* table1_name(Table1Graph which);

WeightedDigraph remove_vertices(const WeightedDigraph& g, std::span<const int> vs);
WeightedDigraph add_vertex(const WeightedDigraph& g, int id, std::span<const GraphEdge> edges);

/// Network-size bounds a unit can verify distributedly (max/min consensus).
struct GraphBounds {
  int n_max = 0;
  double d_max_out = 0.0;
  double a_min = 0.0;
};

/// Lower bound 4 a_min / n_max^2 on lambda2(L + L^T).
double spectral_lower_bound(const GraphBounds& b);

/// Upper bound 4 n_max d_max_out^2 on lambda_max(L^T L).
double spectral_upper_bound(const GraphBounds& b);

/// Per-vertex inputs to the consensus sweep: a local guess for the network
/// size, the own out-degree, and the smallest incident edge weight.
struct LocalBoundsInput {
  int n_guess = 0;
  double d_out = 0.0;
  double w_min = 0.0;
};

/// Synchronous max/min consensus for diameter-many rounds; exact fixed point
/// on strongly connected digraphs. Defaults derive the local inputs from the
/// graph itself (n_guess = own id).
GraphBounds consensus_bounds(const WeightedDigraph& g);
GraphBounds consensus_bounds(const WeightedDigraph& g, std::span<const LocalBoundsInput> local);

// JSON exchange format: {"n": n, "edges": [[i, j, w], ...]}, 1-based ids.
WeightedDigraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const WeightedDigraph& g);

}  // namespace disped
