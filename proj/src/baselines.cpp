#include "mlzsr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlzsr/adam.hpp"
#include "mlzsr/errors.hpp"

namespace mlzsr {

VisualModel build_nrc_model(const VisualDims& dims, double dropout_rate, Rng& rng) {
  return init_visual_model(dims, dropout_rate, rng, VisualFront::kDense);
}

Matrix randomize_label_reps(std::size_t vocab_size, std::size_t semantic_dim, std::uint64_t seed) {
  if (vocab_size == 0 || semantic_dim == 0) throw ConfigError("randomize_label_reps: zero size");
  Rng rng(seed);
  Matrix table(vocab_size, semantic_dim);
  for (std::size_t c = 0; c < vocab_size; ++c) {
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < semantic_dim; ++j) {
      const double v = rng.next_normal();
      table(c, j) = v;
      norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    for (std::size_t j = 0; j < semantic_dim; ++j) table(c, j) /= norm;
  }
  return table;
}

Dataset with_semantics(const Dataset& ds, Matrix semantics) {
  if (semantics.rows != ds.label_count() || semantics.cols != ds.semantic_dim) {
    throw ShapeError("with_semantics: table shape mismatch");
  }
  Dataset out = ds;
  out.semantics = std::move(semantics);
  return out;
}

std::vector<double> instance_feature(const Instance& inst) {
  std::vector<double> out(inst.segments.cols, 0.0);
  for (std::size_t t = 0; t < inst.segments.rows; ++t) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += inst.segments(t, j);
  }
  const double inv = 1.0 / static_cast<double>(inst.segments.rows);
  for (double& v : out) v *= inv;
  return out;
}

Matrix instance_features(const Dataset& ds, const std::vector<int>& instance_ids) {
  Matrix out(instance_ids.size(), ds.feature_dim);
  for (std::size_t i = 0; i < instance_ids.size(); ++i) {
    std::vector<double> f = instance_feature(ds.instances[static_cast<std::size_t>(instance_ids[i])]);
    std::copy(f.begin(), f.end(), out.data.begin() + static_cast<std::ptrdiff_t>(i * out.cols));
  }
  return out;
}

double lambda_from_soft_margin(double c, std::size_t n) {
  if (c <= 0.0 || n == 0) throw ConfigError("lambda_from_soft_margin: need c > 0 and n > 0");
  return 1.0 / (2.0 * c * static_cast<double>(n));
}

LinearModel fit_linear(const Matrix& features, const Matrix& targets, LinearLoss loss,
                       const LinearFitOptions& opts) {
  if (features.rows != targets.rows) throw ShapeError("fit_linear: row counts differ");
  if (features.rows == 0) throw DataError("fit_linear: no training rows");
  const std::size_t n = features.rows;
  const std::size_t d = features.cols;
  const std::size_t outputs = targets.cols;

  LinearModel model;
  model.loss = loss;
  model.lambda = opts.lambda;
  model.w = Matrix(outputs, d);
  model.b.assign(outputs, 0.0);

  AdamState opt_w(outputs, d, opts.lr);
  AdamState opt_b(outputs, 1, opts.lr);
  Matrix bias_mat(outputs, 1);

  Matrix grad_w(outputs, d);
  Matrix grad_b(outputs, 1);
  std::vector<double> pred(outputs);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t step = 0; step < opts.steps; ++step) {
    grad_w.fill(0.0);
    grad_b.fill(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto x = features.row(i);
      matvec(model.w, x, pred, false);
      for (std::size_t o = 0; o < outputs; ++o) pred[o] += model.b[o];
      for (std::size_t o = 0; o < outputs; ++o) {
        const double y = targets(i, o);
        double dout = 0.0;
        switch (loss) {
          case LinearLoss::kSquared:
            dout = 2.0 * (pred[o] - y) * inv_n;
            break;
          case LinearLoss::kHinge:
            if (1.0 - y * pred[o] > 0.0) dout = -y * inv_n;
            break;
          case LinearLoss::kLogistic:
            // d/dz log(1 + exp(-y z)) = -y * sigmoid(-y z)
            dout = -y / (1.0 + std::exp(y * pred[o])) * inv_n;
            break;
        }
        if (dout != 0.0) {
          double* wrow = grad_w.data.data() + o * d;
          for (std::size_t j = 0; j < d; ++j) wrow[j] += dout * x[j];
          grad_b.data[o] += dout;
        }
      }
    }
    if (opts.lambda > 0.0) {
      for (std::size_t j = 0; j < grad_w.data.size(); ++j) {
        grad_w.data[j] += 2.0 * opts.lambda * model.w.data[j];
      }
    }
    adam_step(model.w, grad_w, opt_w);
    adam_step(bias_mat, grad_b, opt_b);
    for (std::size_t o = 0; o < outputs; ++o) model.b[o] = bias_mat.data[o];
  }
  return model;
}

std::vector<double> linear_predict(const LinearModel& model, std::span<const double> x) {
  std::vector<double> out(model.w.rows, 0.0);
  matvec(model.w, x, out, false);
  for (std::size_t o = 0; o < out.size(); ++o) out[o] += model.b[o];
  return out;
}

DspModel dsp_fit(const Matrix& features, const Matrix& mean_semantic_targets,
                 const LinearFitOptions& opts) {
  DspModel model;
  model.reg = fit_linear(features, mean_semantic_targets, LinearLoss::kSquared, opts);
  return model;
}

std::vector<double> dsp_predict(const DspModel& model, std::span<const double> x,
                                const Dataset& ds, const std::vector<int>& label_ids) {
  std::vector<double> predicted = linear_predict(model.reg, x);
  std::vector<double> scores(label_ids.size(), 0.0);
  for (std::size_t j = 0; j < label_ids.size(); ++j) {
    scores[j] = dot(predicted, ds.semantics.row(static_cast<std::size_t>(label_ids[j])));
  }
  return scores;
}

namespace {

Matrix one_vs_rest_targets(const std::vector<std::vector<int>>& train_labels,
                           const std::vector<int>& known_labels) {
  Matrix targets(train_labels.size(), known_labels.size());
  targets.fill(-1.0);
  for (std::size_t i = 0; i < train_labels.size(); ++i) {
    for (int c : train_labels[i]) {
      auto it = std::lower_bound(known_labels.begin(), known_labels.end(), c);
      if (it != known_labels.end() && *it == c) {
        targets(i, static_cast<std::size_t>(it - known_labels.begin())) = 1.0;
      }
    }
  }
  return targets;
}

}  // namespace

ConseModel conse_fit(const Matrix& features, const std::vector<std::vector<int>>& train_labels,
                     const std::vector<int>& known_labels, const LinearFitOptions& opts,
                     std::size_t top_n, WeightNorm norm) {
  if (known_labels.empty()) throw ConfigError("conse_fit: no known labels");
  ConseModel model;
  model.known_labels = known_labels;
  model.top_n = top_n;
  model.norm = norm;
  model.classifiers =
      fit_linear(features, one_vs_rest_targets(train_labels, known_labels), LinearLoss::kLogistic, opts);
  return model;
}

std::vector<double> conse_predict(const ConseModel& model, std::span<const double> x,
                                  const Dataset& ds, const std::vector<int>& label_ids) {
  std::vector<double> logits = linear_predict(model.classifiers, x);
  std::vector<double> probs(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) probs[k] = 1.0 / (1.0 + std::exp(-logits[k]));

  const std::size_t take = std::min(model.top_n, probs.size());
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&probs](std::size_t a, std::size_t b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return a < b;
  });

  double denom = 0.0;
  for (std::size_t r = 0; r < take; ++r) {
    const double p = probs[order[r]];
    denom += model.norm == WeightNorm::kL2 ? p * p : p;
  }
  if (model.norm == WeightNorm::kL2) denom = std::sqrt(denom);
  if (denom <= 0.0) denom = 1.0;

  std::vector<double> combined(ds.semantic_dim, 0.0);
  for (std::size_t r = 0; r < take; ++r) {
    const std::size_t k = order[r];
    const double weight = probs[k] / denom;
    auto s = ds.semantics.row(static_cast<std::size_t>(model.known_labels[k]));
    for (std::size_t j = 0; j < combined.size(); ++j) combined[j] += weight * s[j];
  }

  std::vector<double> scores(label_ids.size(), 0.0);
  for (std::size_t j = 0; j < label_ids.size(); ++j) {
    scores[j] = dot(combined, ds.semantics.row(static_cast<std::size_t>(label_ids[j])));
  }
  return scores;
}

CostaModel costa_fit(const Matrix& features, const std::vector<std::vector<int>>& train_labels,
                     const std::vector<int>& known_labels, const LinearFitOptions& opts) {
  if (known_labels.empty()) throw ConfigError("costa_fit: no known labels");
  CostaModel model;
  model.known_labels = known_labels;
  model.classifiers =
      fit_linear(features, one_vs_rest_targets(train_labels, known_labels), LinearLoss::kHinge, opts);
  return model;
}

Matrix costa_betas(const Dataset& ds, const std::vector<int>& known_labels,
                   const std::vector<int>& unseen_labels) {
  Matrix betas(unseen_labels.size(), known_labels.size());
  for (std::size_t u = 0; u < unseen_labels.size(); ++u) {
    auto su = ds.semantics.row(static_cast<std::size_t>(unseen_labels[u]));
    std::vector<double> neg_dist(known_labels.size());
    double best = -1e300;
    for (std::size_t k = 0; k < known_labels.size(); ++k) {
      auto sk = ds.semantics.row(static_cast<std::size_t>(known_labels[k]));
      double d2 = 0.0;
      for (std::size_t j = 0; j < su.size(); ++j) {
        const double diff = su[j] - sk[j];
        d2 += diff * diff;
      }
      neg_dist[k] = -std::sqrt(d2);
      best = std::max(best, neg_dist[k]);
    }
    double denom = 0.0;
    for (std::size_t k = 0; k < known_labels.size(); ++k) {
      neg_dist[k] = std::exp(neg_dist[k] - best);
      denom += neg_dist[k];
    }
    for (std::size_t k = 0; k < known_labels.size(); ++k) betas(u, k) = neg_dist[k] / denom;
  }
  return betas;
}

std::vector<double> costa_predict(const CostaModel& model, std::span<const double> x,
                                  const std::vector<int>& label_ids, const Matrix& betas,
                                  const std::vector<int>& unseen_labels) {
  std::vector<double> known_scores = linear_predict(model.classifiers, x);
  std::vector<double> out(label_ids.size(), 0.0);
  for (std::size_t j = 0; j < label_ids.size(); ++j) {
    const int label = label_ids[j];
    auto kit = std::lower_bound(model.known_labels.begin(), model.known_labels.end(), label);
    if (kit != model.known_labels.end() && *kit == label) {
      out[j] = known_scores[static_cast<std::size_t>(kit - model.known_labels.begin())];
      continue;
    }
    auto uit = std::lower_bound(unseen_labels.begin(), unseen_labels.end(), label);
    if (uit == unseen_labels.end() || *uit != label) {
      throw DataError("costa_predict: label " + std::to_string(label) + " is neither known nor unseen");
    }
    const std::size_t u = static_cast<std::size_t>(uit - unseen_labels.begin());
    // Combined classifier: w_c = sum_k beta_{ck} w_k (alpha_k = 1), bias included.
    double score = 0.0;
    for (std::size_t k = 0; k < model.known_labels.size(); ++k) {
      score += betas(u, k) * known_scores[k];
    }
    out[j] = score;
  }
  return out;
}

}  // namespace mlzsr
