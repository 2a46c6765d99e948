#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mlzsr/data.hpp"
#include "mlzsr/errors.hpp"
#include "mlzsr/matrix.hpp"

using namespace mlzsr;

namespace {

SyntheticConfig small_config(std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.label_count = 12;
  cfg.cluster_count = 3;
  cfg.train_instances = 30;
  cfg.val_instances = 6;
  cfg.test_instances = 12;
  cfg.segment_count = 8;
  cfg.feature_dim = 6;
  cfg.semantic_dim = 5;
  cfg.labels_min = 2;
  cfg.labels_max = 3;
  cfg.episodes_min = 2;
  cfg.episodes_max = 3;
  cfg.noise_level = 0.2;
  cfg.seed = seed;
  return cfg;
}

bool datasets_bitwise_equal(const Dataset& a, const Dataset& b) {
  if (a.instances.size() != b.instances.size() || a.vocabulary != b.vocabulary) return false;
  if (std::memcmp(a.semantics.data.data(), b.semantics.data.data(),
                  a.semantics.data.size() * sizeof(double)) != 0) {
    return false;
  }
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    if (a.instances[i].labels != b.instances[i].labels) return false;
    if (std::memcmp(a.instances[i].segments.data.data(), b.instances[i].segments.data.data(),
                    a.instances[i].segments.data.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("data");

TEST_CASE("pad_segments appends zero rows and keeps full inputs unchanged") {
  Matrix seg(1, 3);
  seg(0, 0) = 1.0;
  seg(0, 1) = 2.0;
  seg(0, 2) = 3.0;
  Matrix padded = pad_segments(seg, 3);
  CHECK(padded.rows == 3);
  CHECK(padded(0, 1) == 2.0);
  for (std::size_t t = 1; t < 3; ++t) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(padded(t, j) == 0.0);
  }
  Matrix full(3, 3);
  full.fill(0.5);
  CHECK(pad_segments(full, 3).data == full.data);
  CHECK_THROWS_AS(pad_segments(full, 2), DataError);
}

TEST_CASE("generator is deterministic per seed") {
  Dataset a = generate_synthetic(small_config(5));
  Dataset b = generate_synthetic(small_config(5));
  Dataset c = generate_synthetic(small_config(6));
  CHECK(datasets_bitwise_equal(a, b));
  CHECK_FALSE(datasets_bitwise_equal(a, c));
}

TEST_CASE("generated instances satisfy the dataset invariants") {
  Dataset ds = generate_synthetic(small_config(7));
  CHECK(ds.instances.size() == 48);
  CHECK(ds.label_count() == 12);
  for (const Instance& inst : ds.instances) {
    CHECK(inst.labels.size() >= 2);
    CHECK(inst.segments.rows == ds.segment_count);
    CHECK(inst.segments.cols == ds.feature_dim);
    for (int c : inst.labels) {
      CHECK(c >= 0);
      CHECK(static_cast<std::size_t>(c) < ds.label_count());
    }
  }
}

TEST_CASE("noiseless one-label-per-cluster features equal the mapped semantics") {
  SyntheticConfig cfg = small_config(8);
  cfg.label_count = 6;
  cfg.cluster_count = 6;  // one label per cluster
  cfg.noise_level = 0.0;
  cfg.labels_max = 2;
  cfg.episodes_min = 2;
  cfg.episodes_max = 2;
  Dataset ds = generate_synthetic(cfg);

  // Zero noise makes every non-padded segment exactly the feature image of
  // its episode's label, so across the whole dataset there are at most
  // |C| distinct non-zero rows, each tied to exactly one label set-wise.
  std::map<std::vector<double>, std::set<int>> row_labels;
  for (const Instance& inst : ds.instances) {
    for (std::size_t t = 0; t < inst.segments.rows; ++t) {
      auto row = inst.segments.row(t);
      std::vector<double> v(row.begin(), row.end());
      bool zero = true;
      for (double x : v) {
        if (x != 0.0) zero = false;
      }
      if (zero) continue;  // padding
      for (int c : inst.labels) row_labels[v].insert(c);
    }
  }
  CHECK(row_labels.size() <= ds.label_count());
  CHECK(row_labels.size() >= 2);
  // every instance's non-zero rows must come from this shared dictionary
  for (const Instance& inst : ds.instances) {
    for (std::size_t t = 0; t < inst.segments.rows; ++t) {
      auto row = inst.segments.row(t);
      std::vector<double> v(row.begin(), row.end());
      bool zero = true;
      for (double x : v) {
        if (x != 0.0) zero = false;
      }
      if (!zero) CHECK(row_labels.count(v) == 1);
    }
  }
}

TEST_CASE("semantic observation noise changes the stored table but not the features") {
  SyntheticConfig clean = small_config(16);
  SyntheticConfig noisy = clean;
  noisy.semantic_noise = 0.5;
  Dataset a = generate_synthetic(clean);
  Dataset b = generate_synthetic(noisy);
  CHECK(a.semantics.data != b.semantics.data);
  for (std::size_t c = 0; c < b.label_count(); ++c) {
    double norm = 0.0;
    for (std::size_t j = 0; j < b.semantic_dim; ++j) norm += b.semantics(c, j) * b.semantics(c, j);
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // features are driven by the latent vectors, which the noise leaves alone
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(a.instances[i].segments.data == b.instances[i].segments.data);
    CHECK(a.instances[i].labels == b.instances[i].labels);
  }
}

TEST_CASE("label co-occurrence concentrates within clusters") {
  SyntheticConfig cfg = small_config(9);
  cfg.train_instances = 1000;
  cfg.val_instances = 0;
  cfg.test_instances = 0;
  Dataset ds = generate_synthetic(cfg);

  double in_cluster = 0.0, off_cluster = 0.0;
  std::size_t in_pairs = 0, off_pairs = 0;
  for (const Instance& inst : ds.instances) {
    for (std::size_t a = 0; a < inst.labels.size(); ++a) {
      for (std::size_t b = a + 1; b < inst.labels.size(); ++b) {
        const bool same =
            (inst.labels[a] % static_cast<int>(cfg.cluster_count)) ==
            (inst.labels[b] % static_cast<int>(cfg.cluster_count));
        (same ? in_cluster : off_cluster) += 1.0;
      }
    }
  }
  // normalize by the number of label pairs of each kind
  const int k = static_cast<int>(cfg.cluster_count);
  const int per = static_cast<int>(cfg.label_count) / k;
  in_pairs = static_cast<std::size_t>(k * per * (per - 1) / 2);
  off_pairs = static_cast<std::size_t>(static_cast<int>(cfg.label_count) *
                                       (static_cast<int>(cfg.label_count) - 1) / 2) -
              in_pairs;
  const double in_rate = in_cluster / static_cast<double>(in_pairs);
  const double off_rate = off_cluster / static_cast<double>(off_pairs);
  CHECK(in_rate > off_rate);
}

TEST_CASE("dataset save/load round-trips bitwise") {
  Dataset ds = generate_synthetic(small_config(10));
  std::ostringstream os;
  write_dataset(os, ds);
  std::istringstream is(os.str());
  Dataset back = read_dataset(is);
  CHECK(datasets_bitwise_equal(ds, back));
}

TEST_CASE("malformed dataset headers raise parse errors with line context") {
  std::istringstream bad1("WRONG v9\n");
  CHECK_THROWS_AS(read_dataset(bad1), ParseError);
  std::istringstream bad2("MLZSR v1\n2 2 2\n");
  CHECK_THROWS_AS(read_dataset(bad2), ParseError);
  std::istringstream bad3("MLZSR v1\n1 2 2 2 0\n0 a\n1.0 nope\n");
  try {
    read_dataset(bad3);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("ifs split partitions by fractions and strips unseen from targets") {
  SyntheticConfig cfg = small_config(11);
  cfg.train_instances = 10;
  cfg.val_instances = 0;
  cfg.test_instances = 0;
  Dataset ds = generate_synthetic(cfg);
  const double fractions[3] = {0.6, 0.2, 0.2};
  std::vector<int> unseen{1, 5, 9};
  SplitSpec split = make_ifs_split(ds, unseen, fractions, 3);

  CHECK(split.train_ids.size() == 6);
  CHECK(split.val_ids.size() == 2);
  CHECK(split.test_ids.size() == 2);
  validate_split(ds, split);
  CHECK(split.known_labels.size() == 9);

  for (int id : split.train_ids) {
    for (int c : training_labels(ds, split, id)) {
      CHECK(std::find(unseen.begin(), unseen.end(), c) == unseen.end());
    }
    std::vector<int> t = target_vector(ds, split, id);
    CHECK(t.size() == split.known_labels.size());
    for (int v : t) CHECK((v == 1 || v == -1));
  }
}

TEST_CASE("ifs split rejects empty unseen sets and bad fractions") {
  Dataset ds = generate_synthetic(small_config(12));
  const double fractions[3] = {0.6, 0.2, 0.2};
  CHECK_THROWS_AS(make_ifs_split(ds, {}, fractions, 1), ConfigError);
  const double bad[3] = {0.5, 0.2, 0.2};
  CHECK_THROWS_AS(make_ifs_split(ds, {1}, bad, 1), ConfigError);
}

TEST_CASE("lfs split sends exactly the unseen-carrying instances to test") {
  Dataset ds = generate_synthetic(small_config(13));
  std::vector<int> unseen{2, 7};
  SplitSpec split = make_lfs_split(ds, unseen, 4, 5);
  validate_split(ds, split);
  CHECK(split.val_ids.size() == 4);

  // brute-force membership check
  for (std::size_t i = 0; i < ds.instances.size(); ++i) {
    bool has_unseen = false;
    for (int c : ds.instances[i].labels) {
      if (c == 2 || c == 7) has_unseen = true;
    }
    const bool in_test = std::binary_search(split.test_ids.begin(), split.test_ids.end(),
                                            static_cast<int>(i));
    CHECK(in_test == has_unseen);
  }
}

TEST_CASE("lfs split is infeasible when every instance has an unseen label") {
  SyntheticConfig cfg = small_config(14);
  cfg.label_count = 2;
  cfg.cluster_count = 1;
  cfg.labels_min = 2;
  cfg.labels_max = 2;
  Dataset ds = generate_synthetic(cfg);  // every instance carries both labels
  CHECK_THROWS_AS(make_lfs_split(ds, {0}, 1, 1), SplitError);
}

TEST_CASE("split files round-trip") {
  Dataset ds = generate_synthetic(small_config(15));
  SplitSpec split = make_lfs_split(ds, {3, 8}, 5, 17);
  std::ostringstream os;
  write_split(os, split);
  std::istringstream is(os.str());
  SplitSpec back = read_split(is);
  CHECK(back.mode == split.mode);
  CHECK(back.seed == split.seed);
  CHECK(back.val_count == split.val_count);
  CHECK(back.train_ids == split.train_ids);
  CHECK(back.val_ids == split.val_ids);
  CHECK(back.test_ids == split.test_ids);
  CHECK(back.known_labels == split.known_labels);
  CHECK(back.unseen_labels == split.unseen_labels);
}

TEST_CASE("split invariants hold across many random datasets") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    SyntheticConfig cfg = small_config(100 + seed);
    cfg.train_instances = 20;
    cfg.val_instances = 4;
    cfg.test_instances = 8;
    Dataset ds = generate_synthetic(cfg);
    const double fractions[3] = {0.5, 0.25, 0.25};
    SplitSpec ifs = make_ifs_split(ds, {0, 4}, fractions, seed);
    validate_split(ds, ifs);
    try {
      SplitSpec lfs = make_lfs_split(ds, {0, 4}, 3, seed);
      validate_split(ds, lfs);
    } catch (const SplitError&) {
      // acceptable when the unseen labels blanket the dataset
    }
  }
}

TEST_SUITE_END();
