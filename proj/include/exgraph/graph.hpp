#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "exgraph/text.hpp"

namespace exgraph {

using NodeId = std::size_t;

enum class Provenance { belief, argument, commonsense };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::belief: return "belief";
    case Provenance::argument: return "argument";
    case Provenance::commonsense: return "commonsense";
  }
  return "commonsense";
}

struct Node {
  NodeId id = 0;
  std::string label;
  Provenance provenance = Provenance::commonsense;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  NodeId src = 0;
  std::string relation;
  NodeId dst = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Edge spelled with node labels instead of ids; independent of id assignment.
struct Triple {
  std::string src;
  std::string relation;
  std::string dst;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Labeled directed multigraph of concepts. Labels are stored normalized and
// are unique; self-loops and repeated (src, relation, dst) triples are refused.
// Structural validity (connected, acyclic, ...) is checked, never assumed.
class Graph {
 public:
  Graph() = default;

  // Returns the id of the node carrying `label` (after normalization),
  // creating it if absent.
  NodeId add_node(std::string_view label, Provenance provenance = Provenance::commonsense) {
    std::string norm = normalize_label(label);
    if (norm.empty()) throw GraphError("node label is empty");
    if (auto it = by_label_.find(norm); it != by_label_.end()) return it->second;
    const NodeId id = nodes_.size();
    by_label_.emplace(norm, id);
    nodes_.push_back(Node{id, std::move(norm), provenance});
    return id;
  }

  std::optional<NodeId> find(std::string_view label) const {
    auto it = by_label_.find(normalize_label(label));
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
  }

  void add_edge(NodeId src, std::string_view relation, NodeId dst) {
    check_node(src);
    check_node(dst);
    if (src == dst) throw GraphError("self-loop on '" + nodes_[src].label + "'");
    std::string rel = normalize_label(relation);
    if (rel.empty()) throw GraphError("edge relation is empty");
    if (has_edge(src, rel, dst)) {
      throw GraphError("duplicate edge (" + nodes_[src].label + "; " + rel + "; " +
                       nodes_[dst].label + ")");
    }
    edges_.push_back(Edge{src, std::move(rel), dst});
  }

  void add_edge(std::string_view src, std::string_view relation, std::string_view dst) {
    const NodeId s = add_node(src);
    const NodeId d = add_node(dst);
    add_edge(s, relation, d);
  }

  bool has_edge(NodeId src, std::string_view relation, NodeId dst) const {
    return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
      return e.src == src && e.dst == dst && e.relation == relation;
    });
  }

  bool has_edge(const Triple& t) const {
    auto s = find(t.src);
    auto d = find(t.dst);
    return s && d && has_edge(*s, normalize_label(t.relation), *d);
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(NodeId id) const {
    check_node(id);
    return nodes_[id];
  }
  const std::string& label(NodeId id) const { return node(id).label; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  void set_provenance(NodeId id, Provenance p) {
    check_node(id);
    nodes_[id].provenance = p;
  }

  void relabel_node(NodeId id, std::string_view label) {
    check_node(id);
    std::string norm = normalize_label(label);
    if (norm.empty()) throw GraphError("node label is empty");
    if (norm == nodes_[id].label) return;
    if (by_label_.count(norm)) throw GraphError("label '" + norm + "' already in use");
    by_label_.erase(nodes_[id].label);
    by_label_.emplace(norm, id);
    nodes_[id].label = std::move(norm);
  }

  void set_relation(std::size_t edge_index, std::string_view relation) {
    Edge e = edges_.at(edge_index);
    e.relation = normalize_label(relation);
    replace_edge(edge_index, std::move(e));
  }

  // Replaces one edge in place, re-checking the edge invariants.
  void replace_edge(std::size_t edge_index, Edge replacement) {
    check_node(replacement.src);
    check_node(replacement.dst);
    if (edge_index >= edges_.size()) throw GraphError("edge index out of range");
    if (replacement.src == replacement.dst) throw GraphError("self-loop");
    replacement.relation = normalize_label(replacement.relation);
    if (replacement.relation.empty()) throw GraphError("edge relation is empty");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      if (i != edge_index && edges_[i] == replacement) throw GraphError("duplicate edge");
    }
    edges_[edge_index] = std::move(replacement);
  }

  Graph without_edge(std::size_t edge_index) const {
    if (edge_index >= edges_.size()) throw GraphError("edge index out of range");
    Graph g = *this;
    g.edges_.erase(g.edges_.begin() + static_cast<std::ptrdiff_t>(edge_index));
    return g;
  }

  // Drops the node and its incident edges; surviving nodes are re-numbered
  // densely in their original order.
  Graph without_node(NodeId id) const {
    check_node(id);
    Graph g;
    std::vector<NodeId> remap(nodes_.size());
    for (const Node& n : nodes_) {
      if (n.id == id) continue;
      remap[n.id] = g.add_node(n.label, n.provenance);
    }
    for (const Edge& e : edges_) {
      if (e.src == id || e.dst == id) continue;
      g.edges_.push_back(Edge{remap[e.src], e.relation, remap[e.dst]});
    }
    return g;
  }

  std::size_t count(Provenance p) const {
    return static_cast<std::size_t>(std::count_if(
        nodes_.begin(), nodes_.end(), [p](const Node& n) { return n.provenance == p; }));
  }

  Triple triple(const Edge& e) const { return Triple{label(e.src), e.relation, label(e.dst)}; }

  std::vector<Triple> sorted_triples() const {
    std::vector<Triple> out;
    out.reserve(edges_.size());
    for (const Edge& e : edges_) out.push_back(triple(e));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::string> sorted_labels() const {
    std::vector<std::string> out;
    out.reserve(nodes_.size());
    for (const Node& n : nodes_) out.push_back(n.label);
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  void check_node(NodeId id) const {
    if (id >= nodes_.size()) throw GraphError("node id " + std::to_string(id) + " out of range");
  }

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, NodeId> by_label_;
};

// Equality up to node-id renaming. Labels are unique, so this is exactly
// label-preserving isomorphism.
inline bool same_graph(const Graph& a, const Graph& b) {
  return a.sorted_labels() == b.sorted_labels() && a.sorted_triples() == b.sorted_triples();
}

// Ordered set of admissible relation labels, optionally with an inverse map.
class RelationSet {
 public:
  RelationSet() = default;

  explicit RelationSet(const std::vector<std::string>& relations,
                       const std::vector<std::pair<std::string, std::string>>& inverses = {}) {
    for (const auto& r : relations) add(r);
    for (const auto& [r, inv] : inverses) set_inverse(r, inv);
    if (relations_.empty()) throw std::invalid_argument("relation set is empty");
  }

  bool contains(std::string_view relation) const {
    return index_.count(normalize_label(relation)) != 0;
  }

  std::optional<std::string> inverse(std::string_view relation) const {
    auto it = inverse_.find(normalize_label(relation));
    if (it == inverse_.end()) return std::nullopt;
    return it->second;
  }

  bool has_inverses() const { return !inverse_.empty(); }
  std::size_t size() const { return relations_.size(); }
  bool empty() const { return relations_.empty(); }
  const std::string& at(std::size_t i) const { return relations_.at(i); }
  const std::vector<std::string>& relations() const { return relations_; }

 private:
  friend RelationSet parse_relation_set(std::istream&);

  void add(std::string_view relation) {
    std::string norm = normalize_label(relation);
    if (norm.empty()) throw std::invalid_argument("empty relation label");
    if (index_.count(norm)) return;
    index_.emplace(norm, relations_.size());
    relations_.push_back(std::move(norm));
  }

  // Keeps the map an involution: setting r -> s also sets s -> r.
  void set_inverse(std::string_view relation, std::string_view inverse) {
    std::string r = normalize_label(relation);
    std::string s = normalize_label(inverse);
    if (!index_.count(r) || !index_.count(s)) {
      throw std::invalid_argument("inverse map references unknown relation '" +
                                  (index_.count(r) ? s : r) + "'");
    }
    auto check = [this](const std::string& from, const std::string& to) {
      auto it = inverse_.find(from);
      if (it != inverse_.end() && it->second != to) {
        throw std::invalid_argument("inverse map is not an involution at '" + from + "'");
      }
    };
    check(r, s);
    check(s, r);
    inverse_[r] = s;
    inverse_[s] = r;
  }

  std::vector<std::string> relations_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, std::string> inverse_;
};

// One relation per line, optional TAB-separated inverse. Blank lines and
// lines starting with '#' are skipped.
inline RelationSet parse_relation_set(std::istream& in) {
  RelationSet set;
  std::vector<std::pair<std::string, std::string>> inverses;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() > 2) {
      throw std::invalid_argument("relation file line " + std::to_string(lineno) +
                                  ": expected at most 2 columns");
    }
    set.add(cols[0]);
    if (cols.size() == 2 && !trim(cols[1]).empty()) inverses.emplace_back(cols[0], cols[1]);
  }
  if (set.empty()) throw std::invalid_argument("relation file defines no relations");
  for (auto& [r, inv] : inverses) set.set_inverse(r, inv);
  return set;
}

inline RelationSet load_relation_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open relation file '" + path + "'");
  return parse_relation_set(in);
}

inline const std::vector<std::string>& temporal_relation_labels() {
  static const std::vector<std::string> labels{"before", "after", "simultaneous", "is included",
                                               "includes"};
  return labels;
}

inline RelationSet temporal_relations() {
  return RelationSet(temporal_relation_labels(),
                     {{"before", "after"}, {"simultaneous", "simultaneous"},
                      {"includes", "is included"}});
}

}  // namespace exgraph
