#ifndef MLZSR_RECOGNIZE_HPP_
#define MLZSR_RECOGNIZE_HPP_

#include <vector>

#include "mlzsr/data.hpp"
#include "mlzsr/matrix.hpp"
#include "mlzsr/model.hpp"
#include "mlzsr/scoring.hpp"

namespace mlzsr {

// Columns are the semantic embeddings of label_ids in order. A null model
// means the raw semantic table is used directly (the no-semantic-model
// configuration), in which case the column dimension is d_s.
Matrix semantic_embedding_matrix(const SemanticModel* model, const Dataset& ds,
                                 const std::vector<int>& label_ids);

// Pooled relatedness scores of the given instances against label_ids; row i
// holds the scores of instance_ids[i]. Inference mode, no dropout.
Matrix score_instances(const VisualModel& visual, const SemanticModel* semantic,
                       const Dataset& ds, const std::vector<int>& instance_ids,
                       const std::vector<int>& label_ids, Pooling pooling = Pooling::kAverage,
                       std::size_t lagm_groups = 1);

}  // namespace mlzsr

#endif  // MLZSR_RECOGNIZE_HPP_
