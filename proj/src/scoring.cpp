#include "mlzsr/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mlzsr/errors.hpp"

namespace mlzsr {

Matrix segment_scores(const Matrix& embeddings, const Matrix& semantic) {
  if (embeddings.cols != semantic.rows) {
    throw ShapeError("segment_scores: embedding dim " + std::to_string(embeddings.cols) +
                     " vs semantic dim " + std::to_string(semantic.rows));
  }
  return matmul(embeddings, semantic);
}

std::vector<double> pool_average(const Matrix& scores) {
  if (scores.rows == 0) throw ShapeError("pool_average: no segments");
  std::vector<double> out(scores.cols, 0.0);
  for (std::size_t c = 0; c < scores.cols; ++c) {
    double acc = 0.0;
    for (std::size_t t = 0; t < scores.rows; ++t) acc += scores(t, c);
    out[c] = acc / static_cast<double>(scores.rows);
  }
  return out;
}

std::vector<double> pool_max(const Matrix& scores) {
  if (scores.rows == 0) throw ShapeError("pool_max: no segments");
  std::vector<double> out(scores.cols, 0.0);
  for (std::size_t c = 0; c < scores.cols; ++c) {
    double best = scores(0, c);
    for (std::size_t t = 1; t < scores.rows; ++t) best = std::max(best, scores(t, c));
    out[c] = best;
  }
  return out;
}

std::vector<double> pool_lagm(const Matrix& scores, std::size_t group_count) {
  if (scores.rows == 0) throw ShapeError("pool_lagm: no segments");
  if (group_count < 1) throw ConfigError("pool_lagm: group count must be >= 1");
  const std::size_t t_total = scores.rows;
  if ((2 * t_total) % group_count != 0) {
    throw ConfigError("pool_lagm: 2T must be divisible by the group count");
  }
  const std::size_t group_size = 2 * t_total / group_count;

  std::vector<double> out(scores.cols, 0.0);
  for (std::size_t c = 0; c < scores.cols; ++c) {
    double best = 0.0;
    bool first = true;
    for (std::size_t g = 0; g < group_count; ++g) {
      const std::size_t start = (g * group_size) / 2;             // 0-based, inclusive
      std::size_t stop = ((g + 2) * group_size) / 2;              // exclusive
      stop = std::min(stop, t_total);
      double acc = 0.0;
      for (std::size_t t = start; t < stop; ++t) acc += scores(t, c);
      const double avg = acc / static_cast<double>(stop - start);
      if (first || avg > best) {
        best = avg;
        first = false;
      }
    }
    out[c] = best;
  }
  return out;
}

RankedLabels rank_labels(std::span<const double> scores, std::span<const int> label_ids) {
  if (scores.size() != label_ids.size()) {
    throw ShapeError("rank_labels: scores/ids length mismatch");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return label_ids[a] < label_ids[b];
  });
  RankedLabels out;
  out.ids.reserve(order.size());
  out.scores.reserve(order.size());
  for (std::size_t idx : order) {
    out.ids.push_back(label_ids[idx]);
    out.scores.push_back(scores[idx]);
  }
  return out;
}

Matrix normalize_scores(const Matrix& scores) {
  if (scores.size() == 0) throw DataError("normalize_scores: empty score set");
  double lo = scores.data[0];
  double hi = scores.data[0];
  for (double v : scores.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Matrix out(scores.rows, scores.cols);
  if (hi == lo) {
    out.fill(0.5);
    return out;
  }
  const double span = hi - lo;
  for (std::size_t i = 0; i < scores.data.size(); ++i) {
    out.data[i] = (scores.data[i] - lo) / span;
  }
  return out;
}

Matrix fuse_scores(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeError("fuse_scores: shape mismatch");
  Matrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    out.data[i] = (a.data[i] + b.data[i]) / 2.0;
  }
  return out;
}

double instance_label_score(const Matrix& embeddings, std::span<const double> label_embedding) {
  if (embeddings.cols != label_embedding.size()) {
    throw ShapeError("instance_label_score: embedding dim mismatch");
  }
  if (embeddings.rows == 0) throw ShapeError("instance_label_score: no segments");
  double acc = 0.0;
  for (std::size_t t = 0; t < embeddings.rows; ++t) {
    acc += dot(embeddings.row(t), label_embedding);
  }
  return acc / static_cast<double>(embeddings.rows);
}

}  // namespace mlzsr
