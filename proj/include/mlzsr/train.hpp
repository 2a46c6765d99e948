#ifndef MLZSR_TRAIN_HPP_
#define MLZSR_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "mlzsr/adam.hpp"
#include "mlzsr/data.hpp"
#include "mlzsr/loss.hpp"
#include "mlzsr/model.hpp"

namespace mlzsr {

enum class LossKind : std::uint8_t { kRankNet = 0, kHinge = 1 };

enum class ModelKind : std::uint8_t {
  kFull = 0,  // LSTM visual model + semantic model, alternate learning
  kNrc = 1,   // per-segment dense visual front, otherwise identical
  kWse = 2,   // no semantic model; raw semantic table as the embedding
};

struct TrainConfig {
  LossKind loss = LossKind::kRankNet;
  double margin = 1.0;  // hinge only; candidates 0.1 / 1 / 10
  double lr_visual = 1e-2;
  double lr_semantic = 1e-3;
  std::size_t batch_size = 32;
  std::size_t d_e = 24;
  std::size_t n1 = 32;   // LSTM units (or dense front width)
  std::size_t n2 = 32;   // visual dense layer
  std::size_t n1s = 32;  // semantic hidden layer
  double dropout_rate = 0.0;
  std::size_t patience = 10;
  std::size_t max_rounds = 50;
  std::uint64_t seed = 1;
  ModelKind model = ModelKind::kFull;
  RegularizerForm ranknet_regularizer = RegularizerForm::kSoftplus;

  void validate() const;
};

struct Checkpoint {
  ModelKind kind = ModelKind::kFull;
  VisualModel visual;
  SemanticModel semantic;  // absent for kWse
  std::size_t round = 0;
  double best_val_imap = 0.0;
  // Provenance of the semantic table the models were trained against; random
  // tables (the randomized-label ablation) must be regenerated for scoring.
  bool randomized_semantics = false;
  std::uint64_t semantics_seed = 0;

  bool has_semantic_model() const { return kind != ModelKind::kWse; }
};

struct RoundRecord {
  std::size_t round = 0;
  double train_loss = 0.0;     // mean per-instance visual loss over the epoch
  double semantic_loss = 0.0;  // mean per-label semantic loss (0 when frozen)
  double val_imap = 0.0;
};

using TrainLogger = std::function<void(const RoundRecord&)>;

// One pass over shuffled mini-batches against a frozen semantic embedding
// matrix (d_e x |known|). Targets are +1/-1 rows over the known labels,
// aligned with train_ids. Returns the mean per-instance loss.
double train_epoch_visual(VisualModel& model, const Matrix& semantic_embeddings,
                          const Dataset& ds, const std::vector<int>& train_ids,
                          const std::vector<std::vector<int>>& targets, const TrainConfig& cfg,
                          Rng& shuffle_rng, Rng& dropout_rng, std::vector<AdamState>& opt);

// One pass over shuffled known labels against frozen per-instance mean visual
// embeddings (|train| x d_e). label_targets holds one +1/-1 row per known
// label over the training instances. Returns the mean per-label loss.
double train_epoch_semantic(SemanticModel& model, const Matrix& mean_visual, const Dataset& ds,
                            const std::vector<int>& known_labels,
                            const std::vector<std::vector<int>>& label_targets,
                            const TrainConfig& cfg, Rng& shuffle_rng,
                            std::vector<AdamState>& opt);

// Alternate learning: visual epoch, regenerate visual embeddings, semantic
// epoch, regenerate semantic embeddings; early-stops on validation I-MAP in
// the known-label scenario and returns the best snapshot.
Checkpoint alternate_train(const Dataset& ds, const SplitSpec& split, const TrainConfig& cfg,
                           const TrainLogger& logger = nullptr);

// Single-model variant: the semantic table itself is the embedding, only the
// visual model trains. Forces d_e = d_s.
Checkpoint train_wse(const Dataset& ds, const SplitSpec& split, const TrainConfig& cfg,
                     const TrainLogger& logger = nullptr);

// Mean-over-segments visual embedding of each instance, inference mode.
Matrix mean_visual_embeddings(const VisualModel& model, const Dataset& ds,
                              const std::vector<int>& instance_ids);

// I-MAP of the validation set in the known-label-only scenario. A null
// semantic model scores against the raw table.
double validation_imap(const VisualModel& visual, const SemanticModel* semantic,
                       const Dataset& ds, const SplitSpec& split);

}  // namespace mlzsr

#endif  // MLZSR_TRAIN_HPP_
