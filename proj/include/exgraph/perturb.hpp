#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exgraph/graph.hpp"
#include "exgraph/lexicon.hpp"
#include "exgraph/rng.hpp"
#include "exgraph/structure.hpp"

namespace exgraph {

enum class PerturbationKind {
  positive,
  disconnect,
  make_cyclic,
  disconnect_and_cyclic,
  node_removal,
  relation_swap,
  temporal_positive,
  temporal_negative,
};

inline constexpr PerturbationKind kAllPerturbationKinds[] = {
    PerturbationKind::positive,          PerturbationKind::disconnect,
    PerturbationKind::make_cyclic,       PerturbationKind::disconnect_and_cyclic,
    PerturbationKind::node_removal,      PerturbationKind::relation_swap,
    PerturbationKind::temporal_positive, PerturbationKind::temporal_negative,
};

inline std::string_view to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::positive: return "positive";
    case PerturbationKind::disconnect: return "disconnect";
    case PerturbationKind::make_cyclic: return "make_cyclic";
    case PerturbationKind::disconnect_and_cyclic: return "disconnect_and_cyclic";
    case PerturbationKind::node_removal: return "node_removal";
    case PerturbationKind::relation_swap: return "relation_swap";
    case PerturbationKind::temporal_positive: return "temporal_positive";
    case PerturbationKind::temporal_negative: return "temporal_negative";
  }
  return "";
}

inline std::optional<PerturbationKind> parse_perturbation_kind(std::string_view s) {
  for (PerturbationKind k : kAllPerturbationKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline bool is_positive(PerturbationKind k) {
  return k == PerturbationKind::positive || k == PerturbationKind::temporal_positive;
}

inline bool is_structural(PerturbationKind k) {
  return k == PerturbationKind::disconnect || k == PerturbationKind::make_cyclic ||
         k == PerturbationKind::disconnect_and_cyclic || k == PerturbationKind::node_removal;
}

/// Checks the validator signature each kind guarantees by construction.
/// Temporal kinds ignore the provenance constraint.
inline bool satisfies_guarantee(PerturbationKind kind, const ValidationReport& r) {
  switch (kind) {
    case PerturbationKind::disconnect: return !r.connected && r.acyclic;
    case PerturbationKind::make_cyclic: return r.connected && !r.acyclic;
    case PerturbationKind::disconnect_and_cyclic: return !r.connected && !r.acyclic;
    case PerturbationKind::node_removal: return !r.provenance_ok;
    case PerturbationKind::positive:
    case PerturbationKind::relation_swap: return r.structurally_correct();
    case PerturbationKind::temporal_positive: return r.connected && r.acyclic && r.relations_valid;
    case PerturbationKind::temporal_negative: return r.connected && r.acyclic;
  }
  return false;
}

class InapplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Positive: synonym replacement inside one commonsense node.

namespace detail {

inline std::optional<std::string> synonym_for_word(const std::string& word, const Lexicon& lexicon,
                                                   const EmbeddingTable& embeddings) {
  for (const auto& entry : lexicon.entries(word)) {
    if (auto s = best_synonym(word, entry.pos, lexicon, embeddings)) return s;
  }
  return std::nullopt;
}

// Rewritten label, or nothing if no word in the label could be replaced.
inline std::optional<std::string> synonym_label(const std::string& label, const Lexicon& lexicon,
                                                const EmbeddingTable& embeddings) {
  auto words = split_words(label);
  bool changed = false;
  for (auto& w : words) {
    if (auto s = synonym_for_word(w, lexicon, embeddings)) {
      std::replace(s->begin(), s->end(), '_', ' ');
      if (*s != w) {
        w = *s;
        changed = true;
      }
    }
  }
  if (!changed) return std::nullopt;
  std::string out = normalize_label(join(words, " "));
  if (out == label) return std::nullopt;
  return out;
}

}  // namespace detail

/// Replaces the words of one randomly chosen commonsense node by their best
/// synonyms. The node is drawn uniformly among commonsense nodes whose label
/// admits a replacement that does not collide with another node. Empty if no
/// such node exists.
inline std::optional<Graph> perturb_positive(const Graph& graph, std::string_view belief,
                                             std::string_view argument, const Lexicon& lexicon,
                                             const EmbeddingTable& embeddings, Seed seed) {
  std::vector<std::pair<NodeId, std::string>> eligible;
  for (const Node& n : graph.nodes()) {
    if (n.provenance != Provenance::commonsense) continue;
    auto replacement = detail::synonym_label(n.label, lexicon, embeddings);
    if (!replacement || graph.find(*replacement)) continue;
    if (replacement->find_first_of(";()") != std::string::npos) continue;
    eligible.emplace_back(n.id, std::move(*replacement));
  }
  if (eligible.empty()) return std::nullopt;
  Rng rng(seed);
  const auto& [id, label] = eligible[rng.index(eligible.size())];
  Graph out = graph;
  out.relabel_node(id, label);
  // Other nodes keep their provenance; only the rewritten node is re-tested.
  Graph retagged = tag_provenance(out, belief, argument);
  out.set_provenance(id, retagged.node(id).provenance);
  return out;
}

// ---------------------------------------------------------------------------
// Structural negatives (SySt).

namespace detail {

// Pairs (ancestor, descendant) joined by a directed path.
inline std::vector<std::pair<NodeId, NodeId>> ancestor_pairs(const Graph& g) {
  auto reach = reachability(g);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v = 0; v < g.node_count(); ++v)
      if (reach[u][v]) pairs.emplace_back(u, v);
  }
  return pairs;
}

// Adds the back edge descendant -> ancestor with a random relation. The
// triple cannot already exist: the input has a path ancestor ~> descendant,
// so an existing descendant -> ancestor edge would already form a cycle.
inline Graph add_back_edge(const Graph& g, std::pair<NodeId, NodeId> pair,
                           const RelationSet& relations, Rng& rng) {
  Graph out = g;
  out.add_edge(pair.second, relations.at(rng.index(relations.size())), pair.first);
  return out;
}

}  // namespace detail

/// Generates one structurally negative graph. `relations` supplies the label
/// of edges added by the cyclic kinds. Empty when the kind is inapplicable.
inline std::optional<Graph> perturb_structural(const Graph& graph, PerturbationKind kind,
                                               const RelationSet& relations, Seed seed) {
  Rng rng(seed);
  switch (kind) {
    case PerturbationKind::disconnect: {
      auto cut = bridges(graph);
      if (cut.empty()) return std::nullopt;
      return graph.without_edge(cut[rng.index(cut.size())]);
    }
    case PerturbationKind::make_cyclic: {
      if (graph.node_count() < 2 || relations.empty()) return std::nullopt;
      auto pairs = detail::ancestor_pairs(graph);
      if (pairs.empty()) return std::nullopt;
      return detail::add_back_edge(graph, pairs[rng.index(pairs.size())], relations, rng);
    }
    case PerturbationKind::disconnect_and_cyclic: {
      if (relations.empty()) return std::nullopt;
      // Only bridges leaving a component that still holds an ancestor pair
      // after the cut are usable; the back edge stays inside that component
      // so it cannot reconnect the cut.
      struct Option {
        std::size_t bridge;
        std::vector<std::pair<NodeId, NodeId>> pairs;
      };
      std::vector<Option> options;
      for (std::size_t b : bridges(graph)) {
        // Directed paths never cross the cut, so every pair lies inside one
        // component.
        auto pairs = detail::ancestor_pairs(graph.without_edge(b));
        if (!pairs.empty()) options.push_back({b, std::move(pairs)});
      }
      if (options.empty()) return std::nullopt;
      const Option& pick = options[rng.index(options.size())];
      Graph cut = graph.without_edge(pick.bridge);
      return detail::add_back_edge(cut, pick.pairs[rng.index(pick.pairs.size())], relations, rng);
    }
    case PerturbationKind::node_removal: {
      const std::size_t beliefs = graph.count(Provenance::belief);
      const std::size_t arguments = graph.count(Provenance::argument);
      std::vector<NodeId> candidates;
      for (const Node& n : graph.nodes()) {
        if (n.provenance == Provenance::belief && beliefs - 1 < kMinBeliefNodes)
          candidates.push_back(n.id);
        if (n.provenance == Provenance::argument && arguments - 1 < kMinArgumentNodes)
          candidates.push_back(n.id);
      }
      if (candidates.empty()) return std::nullopt;
      return graph.without_node(candidates[rng.index(candidates.size())]);
    }
    default:
      throw std::invalid_argument("perturb_structural: not a structural kind: " +
                                  std::string(to_string(kind)));
  }
}

// ---------------------------------------------------------------------------
// Semantic negatives (SySe): relation swaps, topology untouched.

inline Graph perturb_semantic(const Graph& graph, const RelationSet& relations, Seed seed) {
  if (relations.size() < 2) throw std::invalid_argument("perturb_semantic: need >= 2 relations");
  if (graph.edge_count() == 0) throw std::invalid_argument("perturb_semantic: graph has no edges");
  Rng rng(seed);
  const std::size_t k = rng.between(1, graph.edge_count());
  Graph out = graph;
  for (std::size_t idx : rng.sample(graph.edge_count(), k)) {
    const Edge& e = out.edges()[idx];
    // Alternatives: every other relation that does not duplicate a parallel edge.
    std::vector<const std::string*> options;
    for (const auto& r : relations.relations()) {
      if (r != e.relation && !out.has_edge(e.src, r, e.dst)) options.push_back(&r);
    }
    if (options.empty()) continue;
    out.set_relation(idx, *options[rng.index(options.size())]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Temporal rewrites.

/// Meaning-preserving rewrite: (A before B) -> (B after A), (A simultaneous B)
/// -> (B simultaneous A), (A includes B) -> (B is included A), and back.
inline Edge temporal_positive_map(const Edge& e) {
  const std::string& r = e.relation;
  std::string flipped;
  if (r == "before") flipped = "after";
  else if (r == "after") flipped = "before";
  else if (r == "simultaneous") flipped = "simultaneous";
  else if (r == "includes") flipped = "is included";
  else if (r == "is included") flipped = "includes";
  else throw std::invalid_argument("not a temporal relation: '" + r + "'");
  return Edge{e.dst, flipped, e.src};
}

/// Relations a meaning-breaking rewrite may turn `relation` into.
inline std::vector<std::string> temporal_negative_options(std::string_view relation) {
  static const std::vector<std::string> point{"before", "after", "simultaneous"};
  if (relation == "includes") return {"is included"};
  if (relation == "is included") return {"includes"};
  if (std::find(point.begin(), point.end(), relation) == point.end())
    throw std::invalid_argument("not a temporal relation: '" + std::string(relation) + "'");
  std::vector<std::string> out;
  for (const auto& r : point)
    if (r != relation) out.push_back(r);
  return out;
}

inline Graph perturb_temporal(const Graph& graph, PerturbationKind mode, Seed seed) {
  if (mode != PerturbationKind::temporal_positive && mode != PerturbationKind::temporal_negative)
    throw std::invalid_argument("perturb_temporal: not a temporal kind");
  for (const Edge& e : graph.edges()) (void)temporal_negative_options(e.relation);
  if (graph.edge_count() == 0) throw InapplicableError("temporal rewrite: graph has no edges");

  Rng rng(seed);
  const std::size_t target = rng.between(1, graph.edge_count());
  std::vector<std::size_t> order(graph.edge_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  Graph out = graph;
  std::size_t applied = 0;
  for (std::size_t idx : order) {
    if (applied == target) break;
    const Edge& e = out.edges()[idx];
    if (mode == PerturbationKind::temporal_positive) {
      // Reversal keeps the undirected view, hence connectivity. Only acyclicity
      // can break, when another path already joins the endpoints.
      Graph trial = out;
      try {
        trial.replace_edge(idx, temporal_positive_map(e));
      } catch (const GraphError&) {
        continue;
      }
      if (!is_acyclic(trial)) continue;
      out = std::move(trial);
    } else {
      std::vector<std::string> options;
      for (auto& r : temporal_negative_options(e.relation))
        if (!out.has_edge(e.src, r, e.dst)) options.push_back(std::move(r));
      if (options.empty()) continue;
      out.set_relation(idx, options[rng.index(options.size())]);
    }
    ++applied;
  }
  if (applied == 0) throw InapplicableError("temporal rewrite: no edge admits a valid rewrite");
  return out;
}

}  // namespace exgraph
