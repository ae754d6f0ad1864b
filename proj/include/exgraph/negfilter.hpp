#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exgraph/graph.hpp"
#include "exgraph/metrics.hpp"
#include "exgraph/structure.hpp"

namespace exgraph {

/// Incorrect edges proposed for one correct graph, spelled with node labels.
using CandidateEdgeSet = std::vector<Triple>;

struct FilterThresholds {
  double delta = 0.4;  // acceptable-edge fraction
  double gamma = 0.5;  // incorrect-class probability
};

class RejectedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// `base` with the candidate added, if the result is still structurally
// correct. Unknown labels become commonsense nodes.
inline std::optional<Graph> try_insert(const Graph& base, const Triple& t,
                                       const RelationSet& relations) {
  if (base.has_edge(t)) return std::nullopt;
  Graph g = base;
  try {
    g.add_edge(t.src, t.relation, t.dst);
  } catch (const GraphError&) {
    return std::nullopt;
  }
  if (!validate_structure(g, relations).structurally_correct()) return std::nullopt;
  return g;
}

}  // namespace detail

/// A candidate is acceptable iff it is absent from `correct` and adding it
/// alone keeps all four structural constraints. Each candidate is tested
/// independently against the original graph.
inline bool is_acceptable(const Triple& candidate, const Graph& correct,
                          const RelationSet& relations) {
  return detail::try_insert(correct, candidate, relations).has_value();
}

inline double acceptable_edge_fraction(const CandidateEdgeSet& candidates, const Graph& correct,
                                       const RelationSet& relations) {
  if (candidates.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& c : candidates)
    if (is_acceptable(c, correct, relations)) ++ok;
  return static_cast<double>(ok) / static_cast<double>(candidates.size());
}

/// Greedy insertion in the given order; each candidate is checked against the
/// graph built so far. Throws RejectedError when nothing could be added.
inline Graph assemble_negative(const Graph& correct, const CandidateEdgeSet& candidates,
                               const RelationSet& relations) {
  Graph g = correct;
  std::size_t added = 0;
  for (const auto& c : candidates) {
    if (auto next = detail::try_insert(g, c, relations)) {
      g = std::move(*next);
      ++added;
    }
  }
  if (added == 0) throw RejectedError("no candidate edge could be added to the correct graph");
  return g;
}

enum class FilterStrategy { ae, ip, both };

struct ScoredNegative {
  std::string id;
  double ae = 0.0;
  std::optional<double> ip;
};

/// Inclusive thresholds: keep iff ae >= delta (AE), ip >= gamma (IP), or both.
inline bool keep_negative(const ScoredNegative& s, FilterStrategy strategy,
                          const FilterThresholds& t) {
  const bool need_ip = strategy != FilterStrategy::ae;
  if (need_ip && !s.ip) throw OracleUnavailable("IP score missing for '" + s.id + "'");
  const bool ae_ok = s.ae >= t.delta;
  switch (strategy) {
    case FilterStrategy::ae: return ae_ok;
    case FilterStrategy::ip: return *s.ip >= t.gamma;
    case FilterStrategy::both: return ae_ok && *s.ip >= t.gamma;
  }
  return false;
}

inline std::vector<ScoredNegative> filter_candidates(const std::vector<ScoredNegative>& scored,
                                                     FilterStrategy strategy,
                                                     const FilterThresholds& thresholds) {
  std::vector<ScoredNegative> kept;
  for (const auto& s : scored)
    if (keep_negative(s, strategy, thresholds)) kept.push_back(s);
  return kept;
}

}  // namespace exgraph
