#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "exgraph/graph.hpp"

namespace exgraph {

class SizeCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GedOptions {
  /// Exact search is exponential in node count; graphs above this are refused.
  std::size_t max_nodes = 8;
  /// Normalizing constant; defaults to |V1| + |E1| + |V2| + |E2|.
  std::function<double(const Graph&, const Graph&)> normalizer;
};

inline double total_size_normalizer(const Graph& a, const Graph& b) {
  return static_cast<double>(a.node_count() + a.edge_count() + b.node_count() + b.edge_count());
}

namespace detail {

// Exact unit-cost edit distance by depth-first branch and bound over partial
// injective node maps g1 -> g2 (unmapped = deleted). Costs: node insert,
// delete, relabel = 1; edge insert, delete, relabel = 1. Between a mapped
// node pair the relation multisets R1, R2 cost max(|R1|, |R2|) - |R1 ∩ R2|.
class GedSearch {
 public:
  GedSearch(const Graph& g1, const Graph& g2) : n1_(g1.node_count()), n2_(g2.node_count()) {
    std::unordered_map<std::string, int> ids;
    auto intern = [&ids](const std::string& s) {
      return ids.emplace(s, static_cast<int>(ids.size())).first->second;
    };
    for (const Node& n : g1.nodes()) label1_.push_back(intern(n.label));
    for (const Node& n : g2.nodes()) label2_.push_back(intern(n.label));
    label_space_ = ids.size();
    ids.clear();
    rel1_.assign(n1_ * n1_, {});
    rel2_.assign(n2_ * n2_, {});
    for (const Edge& e : g1.edges()) rel1_[e.src * n1_ + e.dst].push_back(intern(e.relation));
    for (const Edge& e : g2.edges()) rel2_[e.src * n2_ + e.dst].push_back(intern(e.relation));
    for (auto& r : rel1_) std::sort(r.begin(), r.end());
    for (auto& r : rel2_) std::sort(r.begin(), r.end());
    edges1_ = g1.edges();
    edges2_ = g2.edges();

    // Visit high-degree nodes first; their edge terms tighten the bound early.
    order_.resize(n1_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::vector<std::size_t> degree(n1_, 0);
    for (const Edge& e : edges1_) ++degree[e.src], ++degree[e.dst];
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });
    position_.assign(n1_, 0);
    for (std::size_t k = 0; k < n1_; ++k) position_[order_[k]] = k;
    // open1_[k]: g1 edges with an endpoint at depth >= k (still undecided).
    open1_.assign(n1_ + 1, 0);
    for (const Edge& e : edges1_) {
      const std::size_t last = std::max(position_[e.src], position_[e.dst]);
      for (std::size_t k = 0; k <= last; ++k) ++open1_[k];
    }
  }

  std::size_t solve() {
    best_ = n1_ + edges1_.size() + n2_ + edges2_.size();
    map_.assign(n1_, kDeleted);
    used_.assign(n2_, false);
    search(0, 0);
    return best_;
  }

 private:
  static constexpr std::size_t kDeleted = std::numeric_limits<std::size_t>::max();

  static std::size_t pair_cost(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t common = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (*i < *j) ++i;
      else if (*j < *i) ++j;
      else ++common, ++i, ++j;
    }
    return std::max(a.size(), b.size()) - common;
  }

  // Cost added by fixing g1 node u := x given the nodes fixed before it.
  std::size_t step_cost(std::size_t depth, std::size_t u, std::size_t x) const {
    std::size_t c = (x == kDeleted) ? 1 : (label1_[u] == label2_[x] ? 0 : 1);
    for (std::size_t k = 0; k < depth; ++k) {
      const std::size_t w = order_[k];
      const std::size_t y = map_[w];
      const auto& out1 = rel1_[u * n1_ + w];
      const auto& in1 = rel1_[w * n1_ + u];
      if (x == kDeleted || y == kDeleted) {
        c += out1.size() + in1.size();
      } else {
        c += pair_cost(out1, rel2_[x * n2_ + y]);
        c += pair_cost(in1, rel2_[y * n2_ + x]);
      }
    }
    return c;
  }

  std::size_t lower_bound(std::size_t depth) const {
    const std::size_t remaining1 = n1_ - depth;
    std::size_t remaining2 = 0;
    std::vector<int> counts(label_space_, 0);
    for (std::size_t k = depth; k < n1_; ++k) ++counts[label1_[order_[k]]];
    std::size_t common = 0;
    for (std::size_t x = 0; x < n2_; ++x) {
      if (used_[x]) continue;
      ++remaining2;
      if (counts[label2_[x]] > 0) --counts[label2_[x]], ++common;
    }
    std::size_t open2 = 0;
    for (const Edge& e : edges2_)
      if (!used_[e.src] || !used_[e.dst]) ++open2;
    const std::size_t open1 = open1_[depth];
    const std::size_t edge_lb = open1 > open2 ? open1 - open2 : open2 - open1;
    return std::max(remaining1, remaining2) - common + edge_lb;
  }

  std::size_t completion_cost() const {
    std::size_t c = 0;
    for (std::size_t x = 0; x < n2_; ++x)
      if (!used_[x]) ++c;
    for (const Edge& e : edges2_)
      if (!used_[e.src] || !used_[e.dst]) ++c;
    return c;
  }

  void search(std::size_t depth, std::size_t cost) {
    if (depth == n1_) {
      best_ = std::min(best_, cost + completion_cost());
      return;
    }
    if (cost + lower_bound(depth) >= best_) return;
    const std::size_t u = order_[depth];
    auto branch = [&](std::size_t x) {
      const std::size_t c = cost + step_cost(depth, u, x);
      if (c >= best_) return;
      map_[u] = x;
      if (x != kDeleted) used_[x] = true;
      search(depth + 1, c);
      if (x != kDeleted) used_[x] = false;
      map_[u] = kDeleted;
    };
    for (std::size_t x = 0; x < n2_; ++x)
      if (!used_[x] && label2_[x] == label1_[u]) branch(x);
    for (std::size_t x = 0; x < n2_; ++x)
      if (!used_[x] && label2_[x] != label1_[u]) branch(x);
    branch(kDeleted);
  }

  std::size_t n1_, n2_;
  std::size_t label_space_ = 0;
  std::vector<int> label1_, label2_;
  std::vector<std::vector<int>> rel1_, rel2_;
  std::vector<Edge> edges1_, edges2_;
  std::vector<std::size_t> order_, position_, open1_;
  std::vector<std::size_t> map_;
  std::vector<bool> used_;
  std::size_t best_ = 0;
};

}  // namespace detail

/// Minimum number of unit-cost node/edge insertions, deletions and relabelings
/// turning `a` into `b`.
inline std::size_t graph_edit_cost(const Graph& a, const Graph& b, const GedOptions& options = {}) {
  if (a.node_count() > options.max_nodes || b.node_count() > options.max_nodes) {
    throw SizeCapExceeded("graph edit distance: " +
                          std::to_string(std::max(a.node_count(), b.node_count())) +
                          " nodes exceeds cap " + std::to_string(options.max_nodes));
  }
  return detail::GedSearch(a, b).solve();
}

/// Edit cost divided by the normalizing constant, clamped to [0, 1].
inline double graph_edit_distance(const Graph& a, const Graph& b, const GedOptions& options = {}) {
  const double raw = static_cast<double>(graph_edit_cost(a, b, options));
  const double norm = options.normalizer ? options.normalizer(a, b) : total_size_normalizer(a, b);
  if (norm <= 0.0) return 0.0;
  return std::clamp(raw / norm, 0.0, 1.0);
}

}  // namespace exgraph
