#include "mlzsr/train.hpp"

#include <algorithm>
#include <string>

#include "mlzsr/errors.hpp"
#include "mlzsr/eval.hpp"
#include "mlzsr/recognize.hpp"
#include "mlzsr/scoring.hpp"

namespace mlzsr {
namespace {

LossResult apply_loss(const TrainConfig& cfg, bool semantic_side, std::span<const double> scores,
                      std::span<const int> targets) {
  if (cfg.loss == LossKind::kRankNet) {
    return semantic_side ? ranknet_semantic_loss(scores, targets, cfg.ranknet_regularizer)
                         : ranknet_visual_loss(scores, targets);
  }
  return semantic_side ? hinge_semantic_loss(scores, targets, cfg.margin)
                       : hinge_visual_loss(scores, targets, cfg.margin);
}

template <typename MatrixPtr>
std::vector<AdamState> make_opt(const std::vector<MatrixPtr>& params, double lr) {
  std::vector<AdamState> opt;
  opt.reserve(params.size());
  for (const Matrix* p : params) opt.emplace_back(p->rows, p->cols, lr);
  return opt;
}

void apply_updates(std::vector<Matrix*> params, const std::vector<Matrix>& grads,
                   std::vector<AdamState>& opt) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    adam_step(*params[i], grads[i], opt[i]);
  }
}

void accumulate(std::vector<Matrix>& into, const std::vector<Matrix>& grads, double scale) {
  for (std::size_t i = 0; i < into.size(); ++i) {
    for (std::size_t j = 0; j < into[i].data.size(); ++j) {
      into[i].data[j] += scale * grads[i].data[j];
    }
  }
}

std::vector<std::vector<int>> train_target_rows(const Dataset& ds, const SplitSpec& split) {
  std::vector<std::vector<int>> targets;
  targets.reserve(split.train_ids.size());
  for (int id : split.train_ids) targets.push_back(target_vector(ds, split, id));
  return targets;
}

// Per-label +1/-1 rows over the training instances, from the per-instance rows.
std::vector<std::vector<int>> label_target_rows(const std::vector<std::vector<int>>& targets,
                                                std::size_t known_count) {
  std::vector<std::vector<int>> rows(known_count, std::vector<int>(targets.size(), -1));
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t k = 0; k < known_count; ++k) {
      if (targets[i][k] == 1) rows[k][i] = 1;
    }
  }
  return rows;
}

struct EarlyStop {
  std::size_t patience;
  double best = -1.0;
  std::size_t best_round = 0;
  std::size_t stale = 0;

  // Returns true when `value` improves on the best seen so far.
  bool observe(std::size_t round, double value) {
    if (value > best) {
      best = value;
      best_round = round;
      stale = 0;
      return true;
    }
    ++stale;
    return false;
  }

  bool exhausted() const { return stale >= patience; }
};

}  // namespace

void TrainConfig::validate() const {
  if (d_e == 0 || n1 == 0 || n2 == 0 || n1s == 0) throw ConfigError("train: zero layer width");
  if (batch_size == 0) throw ConfigError("train: batch size must be >= 1");
  if (patience == 0) throw ConfigError("train: patience must be >= 1");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ConfigError("train: dropout must lie in [0,1)");
  if (loss == LossKind::kHinge && margin <= 0.0) throw ConfigError("train: hinge margin must be positive");
  if (lr_visual < 0.0 || lr_semantic < 0.0) throw ConfigError("train: negative learning rate");
}

double train_epoch_visual(VisualModel& model, const Matrix& semantic_embeddings,
                          const Dataset& ds, const std::vector<int>& train_ids,
                          const std::vector<std::vector<int>>& targets, const TrainConfig& cfg,
                          Rng& shuffle_rng, Rng& dropout_rng, std::vector<AdamState>& opt) {
  if (semantic_embeddings.rows != model.embed_dim()) {
    throw ShapeError("train_epoch_visual: semantic embedding dim mismatch");
  }
  if (train_ids.size() != targets.size()) {
    throw ShapeError("train_epoch_visual: targets misaligned with train ids");
  }
  const std::size_t t_count = ds.segment_count;

  std::vector<std::size_t> order(train_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle_rng.shuffle(order);

  double loss_sum = 0.0;
  auto params = model.params();
  for (std::size_t batch_start = 0; batch_start < order.size(); batch_start += cfg.batch_size) {
    const std::size_t batch_end = std::min(batch_start + cfg.batch_size, order.size());
    const double inv_batch = 1.0 / static_cast<double>(batch_end - batch_start);
    std::vector<Matrix> batch_grads = zero_grads_like(model.params());

    for (std::size_t b = batch_start; b < batch_end; ++b) {
      const std::size_t idx = order[b];
      const Instance& inst = ds.instances[static_cast<std::size_t>(train_ids[idx])];
      VisualEmbedding emb = visual_embed(model, inst.segments, true, dropout_rng);
      Matrix seg = segment_scores(emb.embeddings, semantic_embeddings);
      std::vector<double> pooled = pool_average(seg);
      LossResult res = apply_loss(cfg, false, pooled, targets[idx]);
      loss_sum += res.loss;

      // Average pooling spreads dL/do evenly over segments, so the upstream
      // gradient has one repeated row: semantic_embeddings * grad / T.
      std::vector<double> row(model.embed_dim(), 0.0);
      matvec(semantic_embeddings, res.grad, row, false);
      Matrix upstream(t_count, model.embed_dim());
      for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t j = 0; j < row.size(); ++j) {
          upstream(t, j) = row[j] / static_cast<double>(t_count);
        }
      }
      std::vector<Matrix> grads = visual_backward(model, emb, upstream);
      accumulate(batch_grads, grads, inv_batch);
    }
    apply_updates(params, batch_grads, opt);
  }
  return loss_sum / static_cast<double>(order.size());
}

double train_epoch_semantic(SemanticModel& model, const Matrix& mean_visual, const Dataset& ds,
                            const std::vector<int>& known_labels,
                            const std::vector<std::vector<int>>& label_targets,
                            const TrainConfig& cfg, Rng& shuffle_rng,
                            std::vector<AdamState>& opt) {
  if (mean_visual.cols != model.embed_dim()) {
    throw ShapeError("train_epoch_semantic: visual embedding dim mismatch");
  }
  if (known_labels.size() != label_targets.size()) {
    throw ShapeError("train_epoch_semantic: label targets misaligned");
  }

  std::vector<std::size_t> order(known_labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle_rng.shuffle(order);

  double loss_sum = 0.0;
  auto params = model.params();
  for (std::size_t idx : order) {
    const std::size_t label = static_cast<std::size_t>(known_labels[idx]);
    SemanticCache cache;
    std::vector<double> e_c = semantic_embed(model, ds.semantics.row(label), &cache);

    std::vector<double> scores(mean_visual.rows, 0.0);
    matvec(mean_visual, e_c, scores, false);
    LossResult res = apply_loss(cfg, true, scores, label_targets[idx]);
    loss_sum += res.loss;

    std::vector<double> upstream(model.embed_dim(), 0.0);
    matvec_transposed(mean_visual, res.grad, upstream);
    std::vector<Matrix> grads = semantic_backward(model, cache, upstream);
    apply_updates(params, grads, opt);
  }
  return loss_sum / static_cast<double>(order.size());
}

Matrix mean_visual_embeddings(const VisualModel& model, const Dataset& ds,
                              const std::vector<int>& instance_ids) {
  Matrix out(instance_ids.size(), model.embed_dim());
  Rng unused(0);
  for (std::size_t i = 0; i < instance_ids.size(); ++i) {
    const Instance& inst = ds.instances[static_cast<std::size_t>(instance_ids[i])];
    VisualEmbedding emb = visual_embed(model, inst.segments, false, unused);
    const double inv_t = 1.0 / static_cast<double>(emb.embeddings.rows);
    for (std::size_t t = 0; t < emb.embeddings.rows; ++t) {
      for (std::size_t j = 0; j < out.cols; ++j) out(i, j) += emb.embeddings(t, j);
    }
    for (std::size_t j = 0; j < out.cols; ++j) out(i, j) *= inv_t;
  }
  return out;
}

double validation_imap(const VisualModel& visual, const SemanticModel* semantic,
                       const Dataset& ds, const SplitSpec& split) {
  Matrix scores = score_instances(visual, semantic, ds, split.val_ids, split.known_labels);
  std::vector<std::vector<int>> truths;
  std::vector<std::vector<int>> rankings;
  truths.reserve(split.val_ids.size());
  for (std::size_t i = 0; i < split.val_ids.size(); ++i) {
    truths.push_back(training_labels(ds, split, split.val_ids[i]));
    RankedLabels ranked = rank_labels(scores.row(i), split.known_labels);
    rankings.push_back(std::move(ranked.ids));
  }
  return instance_map(truths, rankings);
}

Checkpoint alternate_train(const Dataset& ds, const SplitSpec& split, const TrainConfig& cfg,
                           const TrainLogger& logger) {
  cfg.validate();
  if (split.train_ids.empty()) throw ConfigError("alternate_train: empty training set");
  if (split.val_ids.empty()) throw ConfigError("alternate_train: empty validation set");
  if (split.known_labels.size() < 2) throw ConfigError("alternate_train: need >= 2 known labels");
  if (cfg.model == ModelKind::kWse) return train_wse(ds, split, cfg, logger);

  Rng root(cfg.seed);
  Rng rng_visual_init = root.split(1);
  Rng rng_semantic_init = root.split(2);
  Rng rng_shuffle = root.split(3);
  Rng rng_dropout = root.split(4);

  const VisualFront front =
      cfg.model == ModelKind::kNrc ? VisualFront::kDense : VisualFront::kRecurrent;
  VisualModel visual = init_visual_model({ds.feature_dim, cfg.n1, cfg.n2, cfg.d_e},
                                         cfg.dropout_rate, rng_visual_init, front);
  SemanticModel semantic =
      init_semantic_model({ds.semantic_dim, cfg.n1s, cfg.d_e}, rng_semantic_init);

  const std::vector<std::vector<int>> targets = train_target_rows(ds, split);
  const std::vector<std::vector<int>> label_targets =
      label_target_rows(targets, split.known_labels.size());

  std::vector<AdamState> opt_visual = make_opt(visual.params(), cfg.lr_visual);
  std::vector<AdamState> opt_semantic = make_opt(semantic.params(), cfg.lr_semantic);

  Checkpoint best;
  best.kind = cfg.model;
  best.visual = visual;
  best.semantic = semantic;
  best.round = 0;
  best.best_val_imap = validation_imap(visual, &semantic, ds, split);

  EarlyStop stop{cfg.patience};
  stop.observe(0, best.best_val_imap);

  for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
    Matrix sem_embeddings = semantic_embedding_matrix(&semantic, ds, split.known_labels);
    double visual_loss = train_epoch_visual(visual, sem_embeddings, ds, split.train_ids, targets,
                                            cfg, rng_shuffle, rng_dropout, opt_visual);
    Matrix mean_emb = mean_visual_embeddings(visual, ds, split.train_ids);
    double semantic_loss = train_epoch_semantic(semantic, mean_emb, ds, split.known_labels,
                                                label_targets, cfg, rng_shuffle, opt_semantic);
    double val = validation_imap(visual, &semantic, ds, split);

    if (logger) logger({round, visual_loss, semantic_loss, val});
    if (stop.observe(round, val)) {
      best.visual = visual;
      best.semantic = semantic;
      best.round = round;
      best.best_val_imap = val;
    }
    if (stop.exhausted()) break;
  }
  return best;
}

Checkpoint train_wse(const Dataset& ds, const SplitSpec& split, const TrainConfig& cfg,
                     const TrainLogger& logger) {
  cfg.validate();
  if (split.train_ids.empty()) throw ConfigError("train_wse: empty training set");
  if (split.val_ids.empty()) throw ConfigError("train_wse: empty validation set");
  if (split.known_labels.size() < 2) throw ConfigError("train_wse: need >= 2 known labels");

  Rng root(cfg.seed);
  Rng rng_visual_init = root.split(1);
  Rng rng_shuffle = root.split(3);
  Rng rng_dropout = root.split(4);

  // The embedding space is the raw semantic space here.
  VisualModel visual = init_visual_model({ds.feature_dim, cfg.n1, cfg.n2, ds.semantic_dim},
                                         cfg.dropout_rate, rng_visual_init,
                                         VisualFront::kRecurrent);
  const Matrix sem_embeddings = semantic_embedding_matrix(nullptr, ds, split.known_labels);
  const std::vector<std::vector<int>> targets = train_target_rows(ds, split);
  std::vector<AdamState> opt_visual = make_opt(visual.params(), cfg.lr_visual);

  Checkpoint best;
  best.kind = ModelKind::kWse;
  best.visual = visual;
  best.round = 0;
  best.best_val_imap = validation_imap(visual, nullptr, ds, split);

  EarlyStop stop{cfg.patience};
  stop.observe(0, best.best_val_imap);

  for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
    double visual_loss = train_epoch_visual(visual, sem_embeddings, ds, split.train_ids, targets,
                                            cfg, rng_shuffle, rng_dropout, opt_visual);
    double val = validation_imap(visual, nullptr, ds, split);
    if (logger) logger({round, visual_loss, 0.0, val});
    if (stop.observe(round, val)) {
      best.visual = visual;
      best.round = round;
      best.best_val_imap = val;
    }
    if (stop.exhausted()) break;
  }
  return best;
}

}  // namespace mlzsr
