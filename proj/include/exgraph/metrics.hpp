#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "exgraph/graph.hpp"
#include "exgraph/matching.hpp"
#include "exgraph/structure.hpp"

namespace exgraph {

// ---------------------------------------------------------------------------
// Edge similarity

/// Score in [0, 1] between two edges rendered as sentences.
using EdgeSimilarity = std::function<double(std::string_view, std::string_view)>;

inline double exact_match_similarity(std::string_view a, std::string_view b) {
  return a == b ? 1.0 : 0.0;
}

/// Unigram-overlap F1 over whitespace tokens (multiset intersection).
inline double token_f1_similarity(std::string_view a, std::string_view b) {
  auto ta = split_words(a);
  auto tb = split_words(b);
  if (ta.empty() && tb.empty()) return 1.0;
  if (ta.empty() || tb.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : ta) ++counts[t];
  std::size_t common = 0;
  for (const auto& t : tb) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double p = static_cast<double>(common) / static_cast<double>(tb.size());
  const double r = static_cast<double>(common) / static_cast<double>(ta.size());
  return 2 * p * r / (p + r);
}

inline std::string edge_sentence(const Graph& g, const Edge& e) {
  return g.label(e.src) + " " + e.relation + " " + g.label(e.dst);
}

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline PrecisionRecall graph_bertscore_detail(const Graph& pred, const Graph& gold,
                                              const EdgeSimilarity& sim) {
  const std::size_t np = pred.edge_count();
  const std::size_t ng = gold.edge_count();
  if (np == 0 && ng == 0) return {1.0, 1.0, 1.0};
  if (np == 0 || ng == 0) return {};
  std::vector<std::string> ps, gs;
  for (const Edge& e : pred.edges()) ps.push_back(edge_sentence(pred, e));
  for (const Edge& e : gold.edges()) gs.push_back(edge_sentence(gold, e));
  std::vector<std::vector<double>> w(np, std::vector<double>(ng));
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = 0; j < ng; ++j) w[i][j] = std::clamp(sim(ps[i], gs[j]), 0.0, 1.0);
  const double matched = max_weight_matching(w).total;
  PrecisionRecall out;
  out.precision = matched / static_cast<double>(np);
  out.recall = matched / static_cast<double>(ng);
  if (out.precision + out.recall > 0)
    out.f1 = 2 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

/// F1 of the best one-to-one matching between predicted and gold edges.
inline double graph_bertscore(const Graph& pred, const Graph& gold, const EdgeSimilarity& sim) {
  return graph_bertscore_detail(pred, gold, sim).f1;
}

// ---------------------------------------------------------------------------
// Stance oracle contract

enum class Stance { support, counter, incorrect };

inline std::string_view to_string(Stance s) {
  switch (s) {
    case Stance::support: return "support";
    case Stance::counter: return "counter";
    case Stance::incorrect: return "incorrect";
  }
  return "";
}

inline std::optional<Stance> parse_stance(std::string_view s) {
  const std::string t = normalize_label(s);
  if (t == "support" || t == "supports") return Stance::support;
  if (t == "counter" || t == "counters") return Stance::counter;
  if (t == "incorrect") return Stance::incorrect;
  return std::nullopt;
}

struct StanceProbs {
  double support = 0.0;
  double counter = 0.0;
  double incorrect = 0.0;

  double of(Stance s) const {
    switch (s) {
      case Stance::support: return support;
      case Stance::counter: return counter;
      case Stance::incorrect: return incorrect;
    }
    return 0.0;
  }

  Stance predicted() const {
    if (support >= counter && support >= incorrect) return Stance::support;
    if (counter >= incorrect) return Stance::counter;
    return Stance::incorrect;
  }
};

class OracleUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Protocol violation by an oracle (malformed or non-normalized response).
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kProbabilityTolerance = 1e-6;

inline const StanceProbs& check_probs(const StanceProbs& p) {
  const std::array<double, 3> v{p.support, p.counter, p.incorrect};
  for (double x : v) {
    if (!(x >= -kProbabilityTolerance && x <= 1.0 + kProbabilityTolerance))
      throw OracleError("stance probability outside [0, 1]");
  }
  if (std::abs(v[0] + v[1] + v[2] - 1.0) > kProbabilityTolerance)
    throw OracleError("stance probabilities do not sum to 1");
  return p;
}

/// Client contract for an external 3-way (support/counter/incorrect)
/// classifier over a belief and a graph.
using StanceOracle = std::function<StanceProbs(std::string_view belief, const Graph& graph)>;

// ---------------------------------------------------------------------------
// Accuracy metrics

inline double structural_accuracy(const std::vector<ValidationReport>& reports) {
  if (reports.empty()) return 0.0;
  const auto ok = std::count_if(reports.begin(), reports.end(),
                                [](const ValidationReport& r) { return r.structurally_correct(); });
  return static_cast<double>(ok) / static_cast<double>(reports.size());
}

struct SemanticItem {
  std::string belief;
  Graph graph;
  Stance gold;
  ValidationReport report;
};

/// A graph counts iff it is structurally correct and the oracle's predicted
/// class equals the gold stance. Structurally incorrect graphs are not sent to
/// the oracle.
inline bool semantically_correct(const SemanticItem& item, const StanceOracle& oracle) {
  if (!item.report.structurally_correct()) return false;
  const StanceProbs p = check_probs(oracle(item.belief, item.graph));
  const Stance s = p.predicted();
  return s != Stance::incorrect && s == item.gold;
}

inline double semantic_accuracy(const std::vector<SemanticItem>& items, const StanceOracle& oracle) {
  if (items.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& item : items)
    if (semantically_correct(item, oracle)) ++ok;
  return static_cast<double>(ok) / static_cast<double>(items.size());
}

/// Fraction of edges whose removal lowers the oracle's probability of the gold
/// stance. Zero for a graph without edges.
inline double edge_accuracy(const Graph& graph, std::string_view belief, Stance gold,
                            const StanceOracle& oracle) {
  if (graph.edge_count() == 0) return 0.0;
  const double base = check_probs(oracle(belief, graph)).of(gold);
  std::size_t important = 0;
  for (std::size_t i = 0; i < graph.edge_count(); ++i) {
    const double without = check_probs(oracle(belief, graph.without_edge(i))).of(gold);
    if (without < base) ++important;
  }
  return static_cast<double>(important) / static_cast<double>(graph.edge_count());
}

/// Aggregate over a prediction set. Oracle-backed fields are absent when no
/// oracle was configured.
struct MetricReport {
  std::size_t count = 0;
  double stca = 0.0;
  std::optional<double> seca;
  double g_bs = 0.0;
  double ged = 0.0;
  std::optional<double> ea;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

}  // namespace exgraph
