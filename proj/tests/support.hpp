#pragma once

// Random graph generators and brute-force oracles shared by the unit tests and
// the acceptance binary. The oracles deliberately avoid library helpers.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "exgraph/exgraph.hpp"

namespace testsupport {

using namespace exgraph;

inline std::string source_path(const std::string& rel) {
  return std::string(EXGRAPH_SOURCE_DIR) + "/" + rel;
}

inline RelationSet explagraphs_relations() {
  return load_relation_set(source_path("data/relations_explagraphs.txt"));
}

// Belief/argument texts matching the labels produced by random_valid_graph.
inline const std::string kBelief = "b0 b1 b2 b3 are real";
inline const std::string kArgument = "a0 a1 a2 a3 say so";

/// Connected DAG: random spanning tree oriented along a random topological
/// order, plus extra forward edges. Labels b*, a*, c* get belief, argument and
/// commonsense provenance once tagged against kBelief/kArgument.
inline Graph random_valid_graph(Rng& rng, const RelationSet& rel, std::size_t n_belief,
                                std::size_t n_argument, std::size_t n_common, std::size_t extra) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n_belief; ++i) labels.push_back("b" + std::to_string(i));
  for (std::size_t i = 0; i < n_argument; ++i) labels.push_back("a" + std::to_string(i));
  for (std::size_t i = 0; i < n_common; ++i) labels.push_back("c" + std::to_string(i));
  rng.shuffle(labels);
  Graph g;
  for (const auto& l : labels) g.add_node(l);
  const std::size_t n = labels.size();
  auto rnd_rel = [&] { return rel.at(rng.index(rel.size())); };
  for (std::size_t i = 1; i < n; ++i) g.add_edge(rng.index(i), rnd_rel(), i);
  for (std::size_t k = 0; k < extra && n > 1; ++k) {
    std::size_t a = rng.index(n), b = rng.index(n);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const std::string r = rnd_rel();
    if (!g.has_edge(a, r, b)) g.add_edge(a, r, b);
  }
  return tag_provenance(g, kBelief, kArgument);
}

/// Any well-formed graph: arbitrary directed edges, possibly cyclic or split.
inline Graph random_any_graph(Rng& rng, const RelationSet& rel, std::size_t n, std::size_t m,
                              const std::string& prefix = "v") {
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node(prefix + std::to_string(i));
  for (std::size_t k = 0; k < m && n > 1; ++k) {
    const std::size_t a = rng.index(n), b = rng.index(n);
    if (a == b) continue;
    const std::string r = rel.at(rng.index(rel.size()));
    if (!g.has_edge(a, r, b)) g.add_edge(a, r, b);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Structural oracle

inline bool oracle_connected(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> queue{0};
  seen[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t v = queue[head];
    for (const Edge& e : g.edges()) {
      std::size_t w = n;
      if (e.src == v) w = e.dst;
      if (e.dst == v) w = e.src;
      if (w < n && !seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

// Exhaustive simple-path enumeration: a cycle exists iff some path returns to
// its start.
inline bool oracle_acyclic(const Graph& g) {
  const std::size_t n = g.node_count();
  std::function<bool(std::size_t, std::size_t, std::vector<bool>&)> walk =
      [&](std::size_t start, std::size_t v, std::vector<bool>& on_path) {
        for (const Edge& e : g.edges()) {
          if (e.src != v) continue;
          if (e.dst == start) return true;
          if (on_path[e.dst]) continue;
          on_path[e.dst] = true;
          if (walk(start, e.dst, on_path)) return true;
          on_path[e.dst] = false;
        }
        return false;
      };
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> on_path(n, false);
    on_path[s] = true;
    if (walk(s, s, on_path)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// GED oracle: every injective partial node map, with the edges between each
// mapped pair matched by enumerating all relation assignments.

inline std::size_t oracle_relation_cost(std::vector<std::string> a, const std::vector<std::string>& b) {
  if (a.size() < b.size()) return oracle_relation_cost(b, a);
  // a is the larger side: each b relation goes to a distinct a relation.
  std::size_t best = a.size() + b.size();
  std::vector<std::size_t> idx(a.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  do {
    std::size_t c = a.size() - b.size();  // unmatched a relations are deleted
    for (std::size_t i = 0; i < b.size(); ++i) c += a[idx[i]] != b[i];
    best = std::min(best, c);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

inline std::size_t oracle_ged_cost(const Graph& g1, const Graph& g2) {
  const std::size_t n1 = g1.node_count(), n2 = g2.node_count();
  using Key = std::pair<std::size_t, std::size_t>;
  std::map<Key, std::vector<std::string>> r1, r2;
  for (const Edge& e : g1.edges()) r1[{e.src, e.dst}].push_back(e.relation);
  for (const Edge& e : g2.edges()) r2[{e.src, e.dst}].push_back(e.relation);
  constexpr std::size_t kDel = static_cast<std::size_t>(-1);
  std::vector<std::size_t> map(n1, kDel);
  std::vector<bool> used(n2, false);
  std::size_t best = static_cast<std::size_t>(-1);

  auto score = [&] {
    std::size_t c = 0;
    for (std::size_t u = 0; u < n1; ++u) {
      if (map[u] == kDel) ++c;
      else c += g1.label(u) != g2.label(map[u]);
    }
    for (std::size_t x = 0; x < n2; ++x) c += !used[x];
    std::map<Key, bool> covered;
    for (const auto& [k, rels] : r1) {
      const auto [u, v] = k;
      if (map[u] == kDel || map[v] == kDel) {
        c += rels.size();
        continue;
      }
      Key img{map[u], map[v]};
      auto it = r2.find(img);
      c += oracle_relation_cost(rels, it == r2.end() ? std::vector<std::string>{} : it->second);
      covered[img] = true;
    }
    for (const auto& [k, rels] : r2)
      if (!covered.count(k)) c += rels.size();
    return c;
  };

  std::function<void(std::size_t)> rec = [&](std::size_t u) {
    if (u == n1) {
      best = std::min(best, score());
      return;
    }
    map[u] = kDel;
    rec(u + 1);
    for (std::size_t x = 0; x < n2; ++x) {
      if (used[x]) continue;
      used[x] = true;
      map[u] = x;
      rec(u + 1);
      used[x] = false;
    }
    map[u] = kDel;
  };
  rec(0);
  return best;
}

// ---------------------------------------------------------------------------
// Loss oracle: InfoNCE recomputed from the textbook definition.

inline double oracle_info_nce(const Vector& g, const Vector& p, const std::vector<Vector>& negs,
                              double tau) {
  auto cos = [](const Vector& a, const Vector& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
  };
  const double pos = std::exp(cos(g, p) / tau);
  double denom = pos;
  for (const auto& n : negs) denom += std::exp(cos(g, n) / tau);
  return -std::log(pos / denom);
}

}  // namespace testsupport
