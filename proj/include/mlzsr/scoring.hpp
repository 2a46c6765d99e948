#ifndef MLZSR_SCORING_HPP_
#define MLZSR_SCORING_HPP_

#include <span>
#include <vector>

#include "mlzsr/matrix.hpp"

namespace mlzsr {

// Per-segment relatedness scores: entry (t, c) is the dot product between the
// t-th segment embedding and the c-th column of the semantic embedding matrix.
// embeddings is T x d_e, semantic is d_e x |C|; result is T x |C|.
Matrix segment_scores(const Matrix& embeddings, const Matrix& semantic);

// Column means.
std::vector<double> pool_average(const Matrix& scores);
// Column maxima.
std::vector<double> pool_max(const Matrix& scores);
// Local-average global-maximum pooling: group_count groups of N_g = 2T /
// group_count consecutive segments with 50% overlap, averaged per group, then
// the per-column maximum of group averages. Group index ranges are clipped to
// the sequence and averages divide by the clipped group size.
std::vector<double> pool_lagm(const Matrix& scores, std::size_t group_count);

enum class Pooling {
  kAverage,
  kMax,
  kLagm,
};

struct RankedLabels {
  std::vector<int> ids;        // descending score; ties broken by ascending id
  std::vector<double> scores;  // parallel, non-increasing
};

RankedLabels rank_labels(std::span<const double> scores, std::span<const int> label_ids);

// Min-max normalization with extrema taken over the whole matrix (the full
// test set for one model and label collection). Degenerate spread maps
// everything to 0.5.
Matrix normalize_scores(const Matrix& scores);

// Elementwise mean of two already-normalized score matrices.
Matrix fuse_scores(const Matrix& a, const Matrix& b);

// Average over segments of per-segment dot products against one semantic
// embedding; identical arithmetic to the matching pool_average column.
double instance_label_score(const Matrix& embeddings, std::span<const double> label_embedding);

}  // namespace mlzsr

#endif  // MLZSR_SCORING_HPP_
