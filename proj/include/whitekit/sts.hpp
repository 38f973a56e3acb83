#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "whitekit/errors.hpp"
#include "whitekit/matrix_stats.hpp"
#include "whitekit/whitening.hpp"

namespace whitekit {

struct SentencePairSet {
  EmbeddingMatrix left;
  EmbeddingMatrix right;
  Vector gold;
};

struct StsResult {
  double spearman_x100 = 0.0;
  Index n_pairs = 0;
  std::optional<WhiteningTag> whitening_applied;
};

inline void validate_pairs(const SentencePairSet& pairs) {
  require_embeddings(pairs.left, "sts: left");
  require_embeddings(pairs.right, "sts: right");
  if (pairs.left.rows() != pairs.right.rows() ||
      pairs.left.cols() != pairs.right.cols()) {
    throw InvalidInput("sts: left and right shapes differ");
  }
  if (pairs.gold.size() != pairs.left.rows()) {
    throw InvalidInput("sts: gold length does not match pair count");
  }
  if (!pairs.gold.allFinite()) throw InvalidInput("sts: non-finite gold score");
}

inline Vector cosine_scores(const SentencePairSet& pairs) {
  validate_pairs(pairs);
  const Index n = pairs.left.rows();
  Vector scores(n);
  for (Index i = 0; i < n; ++i) {
    const double nl = pairs.left.row(i).norm();
    const double nr = pairs.right.row(i).norm();
    if (!(nl > 0.0) || !(nr > 0.0)) {
      throw DegenerateEmbedding(static_cast<std::size_t>(i));
    }
    const double c = pairs.left.row(i).dot(pairs.right.row(i)) / (nl * nr);
    scores(i) = std::clamp(c, -1.0, 1.0);
  }
  return scores;
}

// 1-based ranks; tied values share the mean of the ranks they span.
inline Vector average_ranks(const Vector& v) {
  const Index n = v.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return v(a) < v(b); });
  Vector ranks(n);
  Index i = 0;
  while (i < n) {
    Index j = i;
    while (j + 1 < n && v(order[j + 1]) == v(order[i])) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Index k = i; k <= j; ++k) ranks(order[k]) = r;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvalidInput("spearman: length mismatch");
  if (a.size() < 2) throw InvalidInput("spearman: need at least 2 values");
  if (!a.allFinite() || !b.allFinite()) {
    throw InvalidInput("spearman: non-finite value");
  }
  const Vector ra = average_ranks(a);
  const Vector rb = average_ranks(b);
  const Vector ca = ra.array() - ra.mean();
  const Vector cb = rb.array() - rb.mean();
  const double den = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
  if (!(den > 0.0)) {
    throw UndefinedCorrelation("spearman: constant input has no ranking");
  }
  return std::clamp(ca.dot(cb) / den, -1.0, 1.0);
}

// Fits one model on the stacked left and right embeddings so both sides are
// mapped by the same transform.
inline WhiteningModel fit_pair_whitening(const SentencePairSet& pairs,
                                         const WhiteningConfig& cfg) {
  validate_pairs(pairs);
  Matrix stacked(pairs.left.rows() * 2, pairs.left.cols());
  stacked << pairs.left, pairs.right;
  return fit_whitening(stacked, cfg);
}

inline StsResult evaluate_sts(const SentencePairSet& pairs,
                              const WhiteningModel* whitening = nullptr,
                              std::optional<FitScope> scope = std::nullopt) {
  validate_pairs(pairs);
  StsResult result;
  result.n_pairs = pairs.left.rows();
  if (whitening == nullptr) {
    result.spearman_x100 = 100.0 * spearman(cosine_scores(pairs), pairs.gold);
    return result;
  }
  if (whitening->w.rows() != pairs.left.cols()) {
    throw InvalidInput("evaluate_sts: whitening dimension mismatch");
  }
  const SentencePairSet whitened{apply_whitening(*whitening, pairs.left),
                                 apply_whitening(*whitening, pairs.right),
                                 pairs.gold};
  result.spearman_x100 = 100.0 * spearman(cosine_scores(whitened), pairs.gold);
  result.whitening_applied =
      WhiteningTag{whitening->kind, scope.value_or(FitScope::all_data)};
  return result;
}

}  // namespace whitekit
