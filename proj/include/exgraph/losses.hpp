#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace exgraph {

class EmptySequence : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ZeroVector : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonPositiveTemperature : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Vector = std::vector<double>;

enum class MarginMode {
  /// max(0, log p_gold - log p_neg + beta), as printed in the original objective.
  paper_verbatim,
  /// max(0, beta - (log p_gold - log p_neg)); zero once gold leads by beta.
  conventional_hinge,
};

struct LossConfig {
  double alpha = 1.0;
  double beta = 1.0;
  MarginMode mm_mode = MarginMode::conventional_hinge;
};

// Reported training settings.
inline constexpr double kMaxMarginAlpha = 1.0;
inline constexpr double kMaxMarginBeta = 1.0;
inline constexpr double kContrastiveAlphaExplaGraphs = 0.1;
inline constexpr double kContrastiveAlphaTemporal = 0.2;
inline constexpr double kDefaultTemperature = 1.0;

inline void check_log_probs(std::span<const double> lp) {
  if (lp.empty()) throw EmptySequence("token log-prob sequence is empty");
  for (double x : lp) {
    if (!(x <= 0.0)) throw std::invalid_argument("token log-probability must be <= 0");
  }
}

/// Sum of negated token log-probabilities.
inline double cross_entropy(std::span<const double> gold) {
  check_log_probs(gold);
  double s = 0.0;
  for (double x : gold) s -= x;
  return s;
}

/// Token-aligned hinge between gold and negative sequences over positions
/// 1..min(k, l); the longer tail is ignored.
inline double max_margin(std::span<const double> gold, std::span<const double> neg, double beta,
                         MarginMode mode = MarginMode::conventional_hinge) {
  check_log_probs(gold);
  check_log_probs(neg);
  if (beta < 0) throw std::invalid_argument("margin must be >= 0");
  const std::size_t n = std::min(gold.size(), neg.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = gold[i] - neg[i];
    s += mode == MarginMode::paper_verbatim ? std::max(0.0, gap + beta)
                                            : std::max(0.0, beta - gap);
  }
  return s;
}

inline double combined_loss(double ce, double aux, double alpha) { return ce + alpha * aux; }

/// Arithmetic mean of token vectors.
inline Vector pool_representation(const std::vector<Vector>& tokens) {
  if (tokens.empty()) throw EmptySequence("no token vectors to pool");
  const std::size_t d = tokens.front().size();
  Vector out(d, 0.0);
  for (const auto& t : tokens) {
    if (t.size() != d) throw std::invalid_argument("token vectors differ in dimension");
    for (std::size_t i = 0; i < d; ++i) out[i] += t[i];
  }
  for (double& x : out) x /= static_cast<double>(tokens.size());
  return out;
}

struct ContrastiveBatch {
  Vector gold;
  Vector positive;
  std::vector<Vector> negatives;
  double temperature = kDefaultTemperature;
};

struct ContrastiveResult {
  double value = 0.0;
  Vector grad_gold;
  Vector grad_positive;
  std::vector<Vector> grad_negatives;
};

namespace detail {

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// InfoNCE over cosine similarities:
///   L = -log( exp(cos(g, p)/t) / sum_{h in {p} u negatives} exp(cos(g, h)/t) )
/// with analytic gradients with respect to every input vector.
inline ContrastiveResult info_nce(const ContrastiveBatch& batch) {
  if (!(batch.temperature > 0.0)) throw NonPositiveTemperature("temperature must be > 0");
  if (batch.negatives.empty()) throw std::invalid_argument("contrastive batch needs >= 1 negative");
  const std::size_t d = batch.gold.size();
  std::vector<const Vector*> cands{&batch.positive};
  for (const auto& n : batch.negatives) cands.push_back(&n);
  if (d == 0) throw std::invalid_argument("empty representation vector");
  for (const Vector* v : cands)
    if (v->size() != d) throw std::invalid_argument("representation dimensions differ");

  const double gnorm = std::sqrt(detail::dot(batch.gold, batch.gold));
  if (gnorm == 0.0) throw ZeroVector("gold representation is zero");
  const std::size_t m = cands.size();
  std::vector<double> norms(m), cos(m), logits(m);
  for (std::size_t j = 0; j < m; ++j) {
    norms[j] = std::sqrt(detail::dot(*cands[j], *cands[j]));
    if (norms[j] == 0.0) throw ZeroVector("candidate representation is zero");
    cos[j] = detail::dot(batch.gold, *cands[j]) / (gnorm * norms[j]);
    logits[j] = cos[j] / batch.temperature;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - top);
  const double lse = top + std::log(z);

  ContrastiveResult out;
  out.value = lse - logits[0];

  // dL/dlogit_j = softmax_j - [j == positive]; dlogit_j = dcos_j / t.
  // dcos(g, h)/dg = h/(|g||h|) - cos g/|g|^2, symmetric in h.
  out.grad_gold.assign(d, 0.0);
  std::vector<Vector> grad_cands(m, Vector(d, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    const double w = (std::exp(logits[j] - lse) - (j == 0 ? 1.0 : 0.0)) / batch.temperature;
    const Vector& h = *cands[j];
    for (std::size_t i = 0; i < d; ++i) {
      out.grad_gold[i] += w * (h[i] / (gnorm * norms[j]) - cos[j] * batch.gold[i] / (gnorm * gnorm));
      grad_cands[j][i] = w * (batch.gold[i] / (gnorm * norms[j]) - cos[j] * h[i] / (norms[j] * norms[j]));
    }
  }
  out.grad_positive = std::move(grad_cands[0]);
  out.grad_negatives.assign(std::make_move_iterator(grad_cands.begin() + 1),
                            std::make_move_iterator(grad_cands.end()));
  return out;
}

}  // namespace exgraph
