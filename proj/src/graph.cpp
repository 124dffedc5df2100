#include "disped/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace disped {

namespace {

// Breadth-first reachability over an index-space adjacency list.
bool all_reachable(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  return count == n;
}

}  // namespace

bool WeightedDigraph::has_vertex(int id) const {
  return std::binary_search(ids.begin(), ids.end(), id);
}

int WeightedDigraph::index_of(int id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return -1;
  return static_cast<int>(it - ids.begin());
}

void WeightedDigraph::validate() const {
  if (ids.empty()) throw std::invalid_argument("graph: vertex set is empty");
  for (size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] <= 0) throw std::invalid_argument("graph: vertex ids must be positive");
    if (k > 0 && ids[k] <= ids[k - 1])
      throw std::invalid_argument("graph: vertex ids must be sorted and unique");
  }
  std::set<std::pair<int, int>> seen;
  for (const GraphEdge& e : edges) {
    if (e.i == e.j) throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(e.i));
    if (!(e.w > 0.0)) throw std::invalid_argument("graph: edge weights must be strictly positive");
    if (!has_vertex(e.i) || !has_vertex(e.j))
      throw std::invalid_argument("graph: edge endpoint outside vertex set");
    if (!seen.insert({e.i, e.j}).second)
      throw std::invalid_argument("graph: duplicate edge (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + ")");
  }
}

bool graphs_equal(const WeightedDigraph& a, const WeightedDigraph& b) {
  if (a.ids != b.ids) return false;
  auto key = [](const GraphEdge& e) { return std::make_tuple(e.i, e.j, e.w); };
  std::vector<std::tuple<int, int, double>> ea, eb;
  for (const auto& e : a.edges) ea.push_back(key(e));
  for (const auto& e : b.edges) eb.push_back(key(e));
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  return ea == eb;
}

LaplacianBundle build_laplacian(const WeightedDigraph& g) {
  g.validate();
  const int n = g.order();
  LaplacianBundle out;
  out.L = Eigen::MatrixXd::Zero(n, n);

  for (const GraphEdge& e : g.edges) out.L(g.index_of(e.i), g.index_of(e.j)) -= e.w;
  // Diagonal = out-degree, assembled as the negated sum of the stored row
  // entries (ascending column order) so every row cancels exactly.
  std::vector<double> dout(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) s += out.L(i, j);
    out.L(i, i) = -s;
    dout[i] = -s;
  }

  if (n == 1) {
    // Degenerate single vertex: trivially connected and balanced,
    // lambda2 reported as the 0 sentinel.
    out.is_strongly_connected = true;
    out.is_weight_balanced = true;
    out.lambda2_sym = 0.0;
    out.lambda_max_ltl = 0.0;
    return out;
  }

  // Connectivity along edge orientation and along its transpose.
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (const GraphEdge& e : g.edges) {
    const int r = g.index_of(e.i);
    const int c = g.index_of(e.j);
    fwd[r].push_back(c);
    bwd[c].push_back(r);
  }
  out.is_strongly_connected = all_reachable(n, fwd) && all_reachable(n, bwd);

  const double dmax = *std::max_element(dout.begin(), dout.end());
  const double tol = 1e-9 * std::max(1.0, dmax);
  double worst_col = 0.0;
  for (int j = 0; j < n; ++j) worst_col = std::max(worst_col, std::abs(out.L.col(j).sum()));
  out.is_weight_balanced = worst_col <= tol;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(out.L + out.L.transpose());
  out.lambda2_sym = sym.eigenvalues()(1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ltl(out.L.transpose() * out.L);
  out.lambda_max_ltl = ltl.eigenvalues()(n - 1);
  return out;
}

WeightedDigraph table1_graph(Table1Graph which) {
  const int n = 54;
  const double w = 0.1;
  auto id54 = [](int x) { return x > 54 ? x - 54 : x; };

  WeightedDigraph g;
  g.ids.resize(n);
  for (int i = 1; i <= n; ++i) g.ids[i - 1] = i;

  const bool undirected_cycle = which != Table1Graph::G;
  for (int i = 1; i <= n; ++i) {
    g.edges.push_back({i, id54(i + 1), w});
    if (undirected_cycle) g.edges.push_back({id54(i + 1), i, w});
    for (int off : {5, 10, 15, 20}) {
      g.edges.push_back({i, id54(i + off), w});
      g.edges.push_back({id54(i + off), i, w});
    }
  }

  switch (which) {
    case Table1Graph::G:
    case Table1Graph::Ghat:
      return g;
    case Table1Graph::Gi: {
      const int drop[] = {4, 11, 25, 45};
      return remove_vertices(g, drop);
    }
    case Table1Graph::Gf: {
      const int drop[] = {4, 25, 27};
      return remove_vertices(g, drop);
    }
  }
  throw std::logic_error("unknown table1 graph");
}

Table1Graph table1_from_name(std::string_view name) {
  if (name == "G") return Table1Graph::G;
  if (name == "Ghat") return Table1Graph::Ghat;
  if (name == "Gi") return Table1Graph::Gi;
  if (name == "Gf") return Table1Graph::Gf;
  throw std::invalid_argument("unknown graph name '" + std::string(name) +
                              "' (expected G, Ghat, Gi, or Gf)");
}

const char* table1_name(Table1Graph which) {
  switch (which) {
    case Table1Graph::G: return "G";
    case Table1Graph::Ghat: return "Ghat";
    case Table1Graph::Gi: return "Gi";
    case Table1Graph::Gf: return "Gf";
  }
  return "?";
}

WeightedDigraph remove_vertices(const WeightedDigraph& g, std::span<const int> vs) {
  WeightedDigraph out;
  std::set<int> drop(vs.begin(), vs.end());
  for (int id : g.ids)
    if (!drop.count(id)) out.ids.push_back(id);
  if (out.ids.empty()) throw std::invalid_argument("remove_vertices: would remove all vertices");
  for (const GraphEdge& e : g.edges)
    if (!drop.count(e.i) && !drop.count(e.j)) out.edges.push_back(e);
  return out;
}

WeightedDigraph add_vertex(const WeightedDigraph& g, int id, std::span<const GraphEdge> edges) {
  if (g.has_vertex(id))
    throw std::invalid_argument("add_vertex: vertex " + std::to_string(id) + " already present");
  WeightedDigraph out = g;
  out.ids.insert(std::upper_bound(out.ids.begin(), out.ids.end(), id), id);
  for (const GraphEdge& e : edges) {
    if (e.i != id && e.j != id)
      throw std::invalid_argument("add_vertex: edge does not touch the new vertex");
    out.edges.push_back(e);
  }
  out.validate();
  return out;
}

double spectral_lower_bound(const GraphBounds& b) {
  if (b.n_max <= 0 || b.a_min <= 0.0)
    throw std::invalid_argument("spectral_lower_bound: bounds must be positive");
  return 4.0 * b.a_min / (static_cast<double>(b.n_max) * b.n_max);
}

double spectral_upper_bound(const GraphBounds& b) {
  if (b.n_max <= 0 || b.d_max_out < 0.0)
    throw std::invalid_argument("spectral_upper_bound: bounds must be positive");
  return 4.0 * b.n_max * b.d_max_out * b.d_max_out;
}

GraphBounds consensus_bounds(const WeightedDigraph& g) {
  const int n = g.order();
  std::vector<LocalBoundsInput> local(n);
  std::vector<double> dout(n, 0.0), wmin(n, std::numeric_limits<double>::infinity());
  for (const GraphEdge& e : g.edges) {
    const int r = g.index_of(e.i);
    const int c = g.index_of(e.j);
    dout[r] += e.w;
    wmin[r] = std::min(wmin[r], e.w);
    wmin[c] = std::min(wmin[c], e.w);
  }
  for (int k = 0; k < n; ++k) local[k] = {g.ids[k], dout[k], wmin[k]};
  return consensus_bounds(g, local);
}

GraphBounds consensus_bounds(const WeightedDigraph& g, std::span<const LocalBoundsInput> local) {
  g.validate();
  const int n = g.order();
  if (static_cast<int>(local.size()) != n)
    throw std::invalid_argument("consensus_bounds: one local input per vertex required");

  if (n == 1) return {local[0].n_guess, local[0].d_out, local[0].w_min};

  // Information flows from j to i along an edge (i, j): during one round a
  // vertex merges the values of the units it hears from.
  std::vector<std::vector<int>> hears(n);
  for (const GraphEdge& e : g.edges) hears[g.index_of(e.i)].push_back(g.index_of(e.j));

  // Rounds needed = diameter of the information-flow digraph.
  std::vector<std::vector<int>> flows(n);
  for (const GraphEdge& e : g.edges) flows[g.index_of(e.j)].push_back(g.index_of(e.i));
  int diameter = 0;
  for (int s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    std::vector<int> queue{s};
    dist[s] = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
      int u = queue[head];
      for (int v : flows[u])
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
    }
    for (int d : dist) {
      if (d < 0) throw std::invalid_argument("consensus_bounds: digraph not strongly connected");
      diameter = std::max(diameter, d);
    }
  }

  std::vector<int> nmax(n);
  std::vector<double> dmax(n), amin(n);
  for (int k = 0; k < n; ++k) {
    nmax[k] = local[k].n_guess;
    dmax[k] = local[k].d_out;
    amin[k] = local[k].w_min;
  }
  for (int round = 0; round < diameter; ++round) {
    auto nmax2 = nmax;
    auto dmax2 = dmax;
    auto amin2 = amin;
    for (int k = 0; k < n; ++k)
      for (int s : hears[k]) {
        nmax2[k] = std::max(nmax2[k], nmax[s]);
        dmax2[k] = std::max(dmax2[k], dmax[s]);
        amin2[k] = std::min(amin2[k], amin[s]);
      }
    nmax.swap(nmax2);
    dmax.swap(dmax2);
    amin.swap(amin2);
  }

  // Finite-time convergence: every vertex now holds the same triple.
  for (int k = 1; k < n; ++k)
    if (nmax[k] != nmax[0] || dmax[k] != dmax[0] || amin[k] != amin[0])
      throw std::logic_error("consensus_bounds: sweep did not reach fixed point");
  return {nmax[0], dmax[0], amin[0]};
}

WeightedDigraph graph_from_json(const nlohmann::json& j) {
  WeightedDigraph g;
  if (j.contains("ids")) {
    // Extension for graphs with gaps in the label space (post-removal).
    g.ids = j.at("ids").get<std::vector<int>>();
  } else {
    const int n = j.at("n").get<int>();
    if (n <= 0) throw std::invalid_argument("graph json: n must be positive");
    g.ids.resize(n);
    for (int i = 1; i <= n; ++i) g.ids[i - 1] = i;
  }
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3)
      throw std::invalid_argument("graph json: each edge must be [i, j, w]");
    g.edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
  }
  g.validate();
  return g;
}

nlohmann::json graph_to_json(const WeightedDigraph& g) {
  nlohmann::json j;
  j["n"] = g.order();
  const bool contiguous = g.ids.back() == g.order();
  if (!contiguous) j["ids"] = g.ids;
  auto& edges = j["edges"] = nlohmann::json::array();
  for (const GraphEdge& e : g.edges) edges.push_back({e.i, e.j, e.w});
  return j;
}

}  // namespace disped
