#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "exgraph/graph.hpp"

namespace exgraph {

/// Per-constraint diagnostics for one explanation graph.
struct ValidationReport {
  bool connected = false;
  bool acyclic = false;
  bool relations_valid = false;
  /// At least two belief nodes and at least two argument nodes.
  bool provenance_ok = false;

  bool structurally_correct() const {
    return connected && acyclic && relations_valid && provenance_ok;
  }

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

inline constexpr std::size_t kMinBeliefNodes = 2;
inline constexpr std::size_t kMinArgumentNodes = 2;

/// Assigns each node's provenance. A node is a belief node if its label occurs
/// in the normalized belief at token boundaries, otherwise an argument node by
/// the same test, otherwise commonsense.
inline Graph tag_provenance(Graph graph, std::string_view belief, std::string_view argument) {
  const std::string b = normalize_label(belief);
  const std::string a = normalize_label(argument);
  for (const Node& n : graph.nodes()) {
    Provenance p = Provenance::commonsense;
    if (contains_at_token_boundary(b, n.label)) {
      p = Provenance::belief;
    } else if (contains_at_token_boundary(a, n.label)) {
      p = Provenance::argument;
    }
    graph.set_provenance(n.id, p);
  }
  return graph;
}

/// Number of connected components of the undirected view.
inline std::size_t component_count(const Graph& g) {
  std::vector<std::size_t> parent(g.node_count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = g.node_count();
  for (const Edge& e : g.edges()) {
    std::size_t a = root(e.src), b = root(e.dst);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

inline bool is_connected(const Graph& g) { return component_count(g) <= 1; }

inline std::vector<std::vector<NodeId>> out_adjacency(const Graph& g) {
  std::vector<std::vector<NodeId>> adj(g.node_count());
  for (const Edge& e : g.edges()) adj[e.src].push_back(e.dst);
  return adj;
}

inline bool is_acyclic(const Graph& g) {
  std::vector<std::size_t> indeg(g.node_count(), 0);
  for (const Edge& e : g.edges()) ++indeg[e.dst];
  auto adj = out_adjacency(g);
  std::vector<NodeId> ready;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (indeg[v] == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    NodeId v = ready.back();
    ready.pop_back();
    ++seen;
    for (NodeId w : adj[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  return seen == g.node_count();
}

inline ValidationReport validate_structure(const Graph& g, const RelationSet& relations) {
  ValidationReport r;
  r.connected = is_connected(g);
  r.acyclic = is_acyclic(g);
  r.relations_valid = std::all_of(g.edges().begin(), g.edges().end(),
                                  [&](const Edge& e) { return relations.contains(e.relation); });
  r.provenance_ok = g.count(Provenance::belief) >= kMinBeliefNodes &&
                    g.count(Provenance::argument) >= kMinArgumentNodes;
  return r;
}

/// reach[u][v] is true iff there is a directed path of length >= 1 from u to v.
inline std::vector<std::vector<bool>> reachability(const Graph& g) {
  const std::size_t n = g.node_count();
  auto adj = out_adjacency(g);
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (NodeId s = 0; s < n; ++s) {
    std::vector<NodeId> stack(adj[s].begin(), adj[s].end());
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      if (reach[s][v]) continue;
      reach[s][v] = true;
      for (NodeId w : adj[v]) stack.push_back(w);
    }
  }
  return reach;
}

/// Indices of edges whose removal increases the number of components of the
/// undirected view. Parallel or antiparallel edges are never bridges.
inline std::vector<std::size_t> bridges(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj(n);
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge& e = g.edges()[i];
    adj[e.src].emplace_back(e.dst, i);
    adj[e.dst].emplace_back(e.src, i);
  }
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> disc(n, kUnseen), low(n, 0);
  std::vector<std::size_t> out;
  std::size_t timer = 0;

  struct Frame {
    NodeId v;
    std::size_t via_edge;
    std::size_t next = 0;
  };
  for (NodeId start = 0; start < n; ++start) {
    if (disc[start] != kUnseen) continue;
    std::vector<Frame> stack{{start, kUnseen}};
    disc[start] = low[start] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.v].size()) {
        auto [w, edge] = adj[f.v][f.next++];
        if (edge == f.via_edge) continue;
        if (disc[w] == kUnseen) {
          disc[w] = low[w] = timer++;
          stack.push_back({w, edge});
        } else {
          low[f.v] = std::min(low[f.v], disc[w]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          NodeId parent = stack.back().v;
          low[parent] = std::min(low[parent], low[done.v]);
          if (low[done.v] > disc[parent]) out.push_back(done.via_edge);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Deterministic DFS edge order. Roots are zero-in-degree nodes in label
/// order (all unvisited nodes if none remain); out-edges are followed in
/// (destination label, relation) order and every edge is emitted when it is
/// traversed, so the result is a permutation of the edge list.
inline std::vector<Edge> canonical_edge_order(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::size_t>> out_edges(n);
  for (std::size_t i = 0; i < g.edge_count(); ++i) out_edges[g.edges()[i].src].push_back(i);
  for (auto& list : out_edges) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      const Edge& ea = g.edges()[a];
      const Edge& eb = g.edges()[b];
      return std::tie(g.label(ea.dst), ea.relation) < std::tie(g.label(eb.dst), eb.relation);
    });
  }
  std::vector<NodeId> by_label(n);
  std::iota(by_label.begin(), by_label.end(), NodeId{0});
  std::sort(by_label.begin(), by_label.end(),
            [&](NodeId a, NodeId b) { return g.label(a) < g.label(b); });

  std::vector<bool> visited(n, false);
  std::vector<Edge> order;
  order.reserve(g.edge_count());

  auto dfs = [&](NodeId root) {
    struct Frame {
      NodeId v;
      std::size_t next = 0;
    };
    std::vector<Frame> stack{{root}};
    visited[root] = true;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next == out_edges[f.v].size()) {
        stack.pop_back();
        continue;
      }
      const Edge& e = g.edges()[out_edges[f.v][f.next++]];
      order.push_back(e);
      if (!visited[e.dst]) {
        visited[e.dst] = true;
        stack.push_back({e.dst});
      }
    }
  };

  while (true) {
    std::vector<std::size_t> indeg(n, 0);
    for (const Edge& e : g.edges())
      if (!visited[e.src]) ++indeg[e.dst];
    std::optional<NodeId> root;
    for (NodeId v : by_label) {
      if (!visited[v] && indeg[v] == 0) {
        root = v;
        break;
      }
    }
    if (!root) {
      for (NodeId v : by_label) {
        if (!visited[v]) {
          root = v;
          break;
        }
      }
    }
    if (!root) break;
    dfs(*root);
  }
  return order;
}

}  // namespace exgraph
