#ifndef MLZSR_DATA_HPP_
#define MLZSR_DATA_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlzsr/matrix.hpp"
#include "mlzsr/rng.hpp"

namespace mlzsr {

struct Instance {
  Matrix segments;         // T x d_x after padding
  std::vector<int> labels; // sorted ascending, at least one entry
};

struct Dataset {
  std::vector<Instance> instances;
  std::vector<std::string> vocabulary;  // name per label id
  Matrix semantics;                     // |C| x d_s
  std::size_t segment_count = 0;        // T
  std::size_t feature_dim = 0;          // d_x
  std::size_t semantic_dim = 0;         // d_s

  std::size_t label_count() const { return vocabulary.size(); }
};

enum class SplitMode : std::uint8_t { kIfs = 0, kLfs = 1 };

struct SplitSpec {
  SplitMode mode = SplitMode::kIfs;
  std::vector<int> train_ids, val_ids, test_ids;  // ascending, disjoint, covering
  std::vector<int> known_labels, unseen_labels;   // ascending, partition of C
  std::uint64_t seed = 0;
  double fractions[3] = {0.0, 0.0, 0.0};          // IFS provenance
  std::size_t val_count = 0;                      // LFS provenance
};

struct SyntheticConfig {
  std::size_t label_count = 40;
  std::size_t cluster_count = 5;
  // Generation-size hints per split role; the generator emits their sum.
  std::size_t train_instances = 600;
  std::size_t val_instances = 100;
  std::size_t test_instances = 200;
  std::size_t segment_count = 12;  // T
  std::size_t feature_dim = 32;    // d_x
  std::size_t semantic_dim = 16;   // d_s
  std::size_t episodes_min = 2;
  std::size_t episodes_max = 4;
  std::size_t labels_min = 2;  // weakly annotated clips carry >= 2 actions
  std::size_t labels_max = 4;
  double noise_level = 0.25;
  // Zero stores the feature-generating vectors verbatim; positive values add
  // Gaussian observation noise to the stored table only, so the published
  // label descriptions are an imperfect view of what drives the features.
  double semantic_noise = 0.0;
  std::uint64_t seed = 1;

  std::size_t total_instances() const { return train_instances + val_instances + test_instances; }
};

// Multi-action sequences with clustered label semantics. Labels take semantic
// vectors near their cluster center; one hidden linear map sends semantics to
// feature space, so features are predictable from label semantics and
// zero-shot transfer is attainable. Within a cluster, higher label ids are
// sampled less often, giving a long-tailed label frequency profile.
Dataset generate_synthetic(const SyntheticConfig& cfg);

// Appends all-zero rows until the matrix has `total` rows.
Matrix pad_segments(const Matrix& segments, std::size_t total);

// Instance-first split: instances are partitioned at random by the given
// fractions; unseen labels are later masked out of train/val targets via
// training_labels().
SplitSpec make_ifs_split(const Dataset& ds, const std::vector<int>& unseen,
                         const double fractions[3], std::uint64_t seed);

// Label-first split: every instance carrying an unseen label goes to test;
// val_count random instances of the remainder form the validation set.
SplitSpec make_lfs_split(const Dataset& ds, const std::vector<int>& unseen,
                         std::size_t val_count, std::uint64_t seed);

// Target labels visible during training: the instance's labels with unseen
// ones removed. May be empty under IFS.
std::vector<int> training_labels(const Dataset& ds, const SplitSpec& split, int instance_id);

// +1/-1 target vector over split.known_labels for one instance.
std::vector<int> target_vector(const Dataset& ds, const SplitSpec& split, int instance_id);

// Checks every split invariant (disjoint coverage, label partition, unseen
// exclusion); throws on violation.
void validate_split(const Dataset& ds, const SplitSpec& split);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);
void write_dataset(std::ostream& os, const Dataset& ds);
Dataset read_dataset(std::istream& is);

void save_split(const SplitSpec& split, const std::string& path);
SplitSpec load_split(const std::string& path);
void write_split(std::ostream& os, const SplitSpec& split);
SplitSpec read_split(std::istream& is);

}  // namespace mlzsr

#endif  // MLZSR_DATA_HPP_
