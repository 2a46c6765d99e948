#include "mlzsr/recognize.hpp"

#include "mlzsr/errors.hpp"

namespace mlzsr {

Matrix semantic_embedding_matrix(const SemanticModel* model, const Dataset& ds,
                                 const std::vector<int>& label_ids) {
  const std::size_t d = model ? model->embed_dim() : ds.semantic_dim;
  Matrix out(d, label_ids.size());
  for (std::size_t j = 0; j < label_ids.size(); ++j) {
    const std::size_t c = static_cast<std::size_t>(label_ids[j]);
    if (c >= ds.label_count()) throw DataError("semantic_embedding_matrix: label id out of range");
    if (model) {
      std::vector<double> e = semantic_embed(*model, ds.semantics.row(c));
      for (std::size_t k = 0; k < d; ++k) out(k, j) = e[k];
    } else {
      for (std::size_t k = 0; k < d; ++k) out(k, j) = ds.semantics(c, k);
    }
  }
  return out;
}

Matrix score_instances(const VisualModel& visual, const SemanticModel* semantic,
                       const Dataset& ds, const std::vector<int>& instance_ids,
                       const std::vector<int>& label_ids, Pooling pooling,
                       std::size_t lagm_groups) {
  Matrix sem = semantic_embedding_matrix(semantic, ds, label_ids);
  Matrix out(instance_ids.size(), label_ids.size());
  Rng unused(0);
  for (std::size_t i = 0; i < instance_ids.size(); ++i) {
    const std::size_t id = static_cast<std::size_t>(instance_ids[i]);
    if (id >= ds.instances.size()) throw DataError("score_instances: instance id out of range");
    VisualEmbedding emb = visual_embed(visual, ds.instances[id].segments, false, unused);
    Matrix seg = segment_scores(emb.embeddings, sem);
    std::vector<double> pooled;
    switch (pooling) {
      case Pooling::kAverage:
        pooled = pool_average(seg);
        break;
      case Pooling::kMax:
        pooled = pool_max(seg);
        break;
      case Pooling::kLagm:
        pooled = pool_lagm(seg, lagm_groups);
        break;
    }
    for (std::size_t j = 0; j < pooled.size(); ++j) out(i, j) = pooled[j];
  }
  return out;
}

}  // namespace mlzsr
