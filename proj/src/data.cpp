#include "mlzsr/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "mlzsr/errors.hpp"

namespace mlzsr {
namespace {

constexpr double kSemanticJitter = 0.2;
constexpr double kSecondClusterProb = 0.2;
// Within-cluster sampling weight for the j-th label of a cluster; later labels
// are rarer, which gives split protocols a long tail to work with.
double label_weight(std::size_t rank_in_cluster) {
  return std::pow(2.0, -static_cast<double>(rank_in_cluster) / 3.0);
}

void format_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

struct LineReader {
  std::istream& is;
  std::size_t line_no = 0;

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(is, line)) {
      throw ParseError(std::string("unexpected end of file, expected ") + what + " after line " +
                       std::to_string(line_no));
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
  }
};

std::vector<double> parse_doubles(LineReader& r, const std::string& line, std::size_t expected) {
  std::vector<double> out;
  out.reserve(expected);
  const char* p = line.c_str();
  char* end = nullptr;
  while (*p) {
    while (*p == ' ' || *p == '\t') ++p;
    if (!*p) break;
    double v = std::strtod(p, &end);
    if (end == p) r.fail("expected a number, got '" + std::string(p) + "'");
    out.push_back(v);
    p = end;
  }
  if (out.size() != expected) {
    r.fail("expected " + std::to_string(expected) + " values, got " + std::to_string(out.size()));
  }
  return out;
}

std::vector<int> parse_ints(LineReader& r, const std::string& line) {
  std::vector<int> out;
  std::istringstream ss(line);
  long v;
  while (ss >> v) out.push_back(static_cast<int>(v));
  if (!ss.eof()) r.fail("expected integers, got '" + line + "'");
  return out;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void check_unseen(const Dataset& ds, const std::vector<int>& unseen) {
  if (unseen.empty()) throw ConfigError("split: at least one unseen label is required");
  if (unseen.size() >= ds.label_count()) {
    throw ConfigError("split: unseen labels must leave at least one known label");
  }
  std::vector<int> u = sorted_unique(unseen);
  if (u.size() != unseen.size()) throw ConfigError("split: duplicate unseen label ids");
  for (int c : u) {
    if (c < 0 || static_cast<std::size_t>(c) >= ds.label_count()) {
      throw ConfigError("split: unseen label id " + std::to_string(c) + " out of range");
    }
  }
}

std::vector<int> complement_labels(std::size_t label_count, const std::vector<int>& unseen) {
  std::vector<bool> is_unseen(label_count, false);
  for (int c : unseen) is_unseen[static_cast<std::size_t>(c)] = true;
  std::vector<int> known;
  for (std::size_t c = 0; c < label_count; ++c) {
    if (!is_unseen[c]) known.push_back(static_cast<int>(c));
  }
  return known;
}

// Weighted sampling without replacement via sequential renormalized draws.
std::vector<int> weighted_sample(const std::vector<int>& pool, const std::vector<double>& weights,
                                 std::size_t count, Rng& rng) {
  std::vector<int> items = pool;
  std::vector<double> w = weights;
  std::vector<int> chosen;
  chosen.reserve(count);
  for (std::size_t n = 0; n < count && !items.empty(); ++n) {
    double total = 0.0;
    for (double x : w) total += x;
    double r = rng.next_double() * total;
    std::size_t pick = items.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      acc += w[i];
      if (r < acc) {
        pick = i;
        break;
      }
    }
    chosen.push_back(items[pick]);
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(pick));
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return chosen;
}

}  // namespace

Matrix pad_segments(const Matrix& segments, std::size_t total) {
  if (segments.rows == 0) throw DataError("pad_segments: need at least one segment");
  if (segments.rows > total) {
    throw DataError("pad_segments: " + std::to_string(segments.rows) +
                    " segments exceed target " + std::to_string(total));
  }
  Matrix out(total, segments.cols);
  std::copy(segments.data.begin(), segments.data.end(), out.data.begin());
  return out;
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.label_count < 2) throw ConfigError("synthetic: need at least two labels");
  if (cfg.cluster_count < 1 || cfg.cluster_count > cfg.label_count) {
    throw ConfigError("synthetic: cluster count must lie in [1, label count]");
  }
  if (cfg.labels_min < 2) throw ConfigError("synthetic: instances need at least two labels");
  if (cfg.labels_max < cfg.labels_min || cfg.labels_max > cfg.label_count) {
    throw ConfigError("synthetic: invalid labels-per-instance range");
  }
  if (cfg.episodes_max < cfg.episodes_min || cfg.episodes_min < 1) {
    throw ConfigError("synthetic: invalid episodes-per-instance range");
  }
  if (cfg.segment_count < cfg.episodes_max || cfg.segment_count < cfg.labels_max) {
    throw ConfigError("synthetic: segment count too small for the episode range");
  }
  if (cfg.feature_dim == 0 || cfg.semantic_dim == 0) {
    throw ConfigError("synthetic: feature and semantic dims must be >= 1");
  }
  if (cfg.total_instances() == 0) throw ConfigError("synthetic: no instances requested");
  if (cfg.noise_level < 0.0) throw ConfigError("synthetic: negative noise level");
  if (cfg.semantic_noise < 0.0) throw ConfigError("synthetic: negative semantic noise");

  Rng root(cfg.seed);
  Rng rng_sem = root.split(1);
  Rng rng_map = root.split(2);
  Rng rng_inst = root.split(3);

  Dataset ds;
  ds.segment_count = cfg.segment_count;
  ds.feature_dim = cfg.feature_dim;
  ds.semantic_dim = cfg.semantic_dim;

  // Cluster centers, then per-label jittered unit vectors. Label c belongs to
  // cluster c % cluster_count; its rank within the cluster is c / cluster_count.
  Matrix centers(cfg.cluster_count, cfg.semantic_dim);
  for (double& v : centers.data) v = rng_sem.next_normal();

  // Latent per-label vectors drive the features; the stored table equals them
  // unless semantic observation noise is requested.
  Matrix latent(cfg.label_count, cfg.semantic_dim);
  ds.semantics = Matrix(cfg.label_count, cfg.semantic_dim);
  ds.vocabulary.resize(cfg.label_count);
  for (std::size_t c = 0; c < cfg.label_count; ++c) {
    const std::size_t cluster = c % cfg.cluster_count;
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < cfg.semantic_dim; ++j) {
      double v = centers(cluster, j) + kSemanticJitter * rng_sem.next_normal();
      latent(c, j) = v;
      norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    for (std::size_t j = 0; j < cfg.semantic_dim; ++j) latent(c, j) /= norm;
    char name[32];
    std::snprintf(name, sizeof(name), "action_%03zu", c);
    ds.vocabulary[c] = name;
  }
  if (cfg.semantic_noise > 0.0) {
    for (std::size_t c = 0; c < cfg.label_count; ++c) {
      double norm_sq = 0.0;
      for (std::size_t j = 0; j < cfg.semantic_dim; ++j) {
        double v = latent(c, j) + cfg.semantic_noise * rng_sem.next_normal();
        ds.semantics(c, j) = v;
        norm_sq += v * v;
      }
      const double norm = std::sqrt(norm_sq);
      for (std::size_t j = 0; j < cfg.semantic_dim; ++j) ds.semantics(c, j) /= norm;
    }
  } else {
    ds.semantics = latent;
  }

  // Hidden semantic-to-feature map shared by all labels.
  Matrix feature_map(cfg.feature_dim, cfg.semantic_dim);
  const double map_scale = 1.0 / std::sqrt(static_cast<double>(cfg.semantic_dim));
  for (double& v : feature_map.data) v = rng_map.next_normal() * map_scale;

  std::vector<std::vector<int>> cluster_members(cfg.cluster_count);
  for (std::size_t c = 0; c < cfg.label_count; ++c) {
    cluster_members[c % cfg.cluster_count].push_back(static_cast<int>(c));
  }

  const std::size_t total = cfg.total_instances();
  ds.instances.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    Rng rng = rng_inst.split(i);

    std::vector<std::size_t> clusters{rng.uniform_index(cfg.cluster_count)};
    if (cfg.cluster_count > 1 && rng.next_double() < kSecondClusterProb) {
      std::size_t second = rng.uniform_index(cfg.cluster_count - 1);
      if (second >= clusters[0]) ++second;
      clusters.push_back(second);
    }

    std::size_t n_labels = cfg.labels_min + rng.uniform_index(cfg.labels_max - cfg.labels_min + 1);
    std::vector<int> pool;
    std::vector<double> weights;
    for (std::size_t k = 0; clusters.size() <= cfg.cluster_count; ++k) {
      pool.clear();
      weights.clear();
      for (std::size_t cl : clusters) {
        for (std::size_t j = 0; j < cluster_members[cl].size(); ++j) {
          pool.push_back(cluster_members[cl][j]);
          weights.push_back(label_weight(j));
        }
      }
      if (pool.size() >= n_labels) break;
      // Tiny clusters: widen until the pool can supply the label set.
      std::size_t extra = rng.uniform_index(cfg.cluster_count);
      if (std::find(clusters.begin(), clusters.end(), extra) == clusters.end()) {
        clusters.push_back(extra);
      }
    }
    n_labels = std::min(n_labels, pool.size());
    std::vector<int> chosen = weighted_sample(pool, weights, n_labels, rng);

    std::size_t n_episodes =
        cfg.episodes_min + rng.uniform_index(cfg.episodes_max - cfg.episodes_min + 1);
    n_episodes = std::max(n_episodes, chosen.size());
    std::vector<int> episode_labels = chosen;
    while (episode_labels.size() < n_episodes) {
      episode_labels.push_back(chosen[rng.uniform_index(chosen.size())]);
    }
    rng.shuffle(episode_labels);

    // Real length before padding; up to a quarter of the sequence is padding.
    const std::size_t max_pad = cfg.segment_count / 4;
    std::size_t real_len = cfg.segment_count - rng.uniform_index(max_pad + 1);
    real_len = std::max(real_len, n_episodes);

    // Episode boundaries: n_episodes contiguous blocks, each at least one segment.
    std::vector<std::size_t> cuts;
    if (n_episodes > 1) {
      std::vector<std::size_t> positions(real_len - 1);
      for (std::size_t p = 0; p < positions.size(); ++p) positions[p] = p + 1;
      rng.shuffle(positions);
      cuts.assign(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(n_episodes - 1));
      std::sort(cuts.begin(), cuts.end());
    }
    cuts.push_back(real_len);

    Matrix segments(real_len, cfg.feature_dim);
    std::size_t start = 0;
    for (std::size_t e = 0; e < n_episodes; ++e) {
      const int label = episode_labels[e];
      std::vector<double> base(cfg.feature_dim, 0.0);
      matvec(feature_map, latent.row(static_cast<std::size_t>(label)), base, false);
      for (std::size_t t = start; t < cuts[e]; ++t) {
        for (std::size_t j = 0; j < cfg.feature_dim; ++j) {
          segments(t, j) = base[j] + cfg.noise_level * rng.next_normal();
        }
      }
      start = cuts[e];
    }

    Instance inst;
    inst.segments = pad_segments(segments, cfg.segment_count);
    inst.labels = sorted_unique(chosen);
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

SplitSpec make_ifs_split(const Dataset& ds, const std::vector<int>& unseen,
                         const double fractions[3], std::uint64_t seed) {
  check_unseen(ds, unseen);
  double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::fabs(sum - 1.0) > 1e-9) throw ConfigError("ifs split: fractions must sum to 1");
  for (int i = 0; i < 3; ++i) {
    if (fractions[i] < 0.0) throw ConfigError("ifs split: negative fraction");
  }
  const std::size_t n = ds.instances.size();
  if (n == 0) throw DataError("ifs split: empty dataset");

  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  Rng rng(seed);
  rng.shuffle(order);

  std::size_t n_train = static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(n)));
  std::size_t n_val = static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(n)));
  n_train = std::min(n_train, n);
  n_val = std::min(n_val, n - n_train);

  SplitSpec split;
  split.mode = SplitMode::kIfs;
  split.seed = seed;
  split.fractions[0] = fractions[0];
  split.fractions[1] = fractions[1];
  split.fractions[2] = fractions[2];
  split.train_ids.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.val_ids.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                       order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test_ids.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.val_ids.begin(), split.val_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  split.unseen_labels = sorted_unique(unseen);
  split.known_labels = complement_labels(ds.label_count(), split.unseen_labels);
  return split;
}

SplitSpec make_lfs_split(const Dataset& ds, const std::vector<int>& unseen,
                         std::size_t val_count, std::uint64_t seed) {
  check_unseen(ds, unseen);
  const std::size_t n = ds.instances.size();
  if (n == 0) throw DataError("lfs split: empty dataset");

  std::vector<int> unseen_sorted = sorted_unique(unseen);
  std::vector<bool> is_unseen(ds.label_count(), false);
  for (int c : unseen_sorted) is_unseen[static_cast<std::size_t>(c)] = true;

  SplitSpec split;
  split.mode = SplitMode::kLfs;
  split.seed = seed;
  split.val_count = val_count;
  split.unseen_labels = unseen_sorted;
  split.known_labels = complement_labels(ds.label_count(), unseen_sorted);

  std::vector<int> rest;
  for (std::size_t i = 0; i < n; ++i) {
    bool has_unseen = false;
    for (int c : ds.instances[i].labels) {
      if (is_unseen[static_cast<std::size_t>(c)]) {
        has_unseen = true;
        break;
      }
    }
    if (has_unseen) {
      split.test_ids.push_back(static_cast<int>(i));
    } else {
      rest.push_back(static_cast<int>(i));
    }
  }
  if (rest.empty()) {
    throw SplitError("lfs split: every instance carries an unseen label");
  }
  if (val_count >= rest.size()) {
    throw SplitError("lfs split: validation would leave no training instances");
  }
  Rng rng(seed);
  rng.shuffle(rest);
  split.val_ids.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(val_count));
  split.train_ids.assign(rest.begin() + static_cast<std::ptrdiff_t>(val_count), rest.end());
  std::sort(split.val_ids.begin(), split.val_ids.end());
  std::sort(split.train_ids.begin(), split.train_ids.end());
  return split;
}

std::vector<int> training_labels(const Dataset& ds, const SplitSpec& split, int instance_id) {
  const Instance& inst = ds.instances.at(static_cast<std::size_t>(instance_id));
  std::vector<int> out;
  for (int c : inst.labels) {
    if (std::binary_search(split.known_labels.begin(), split.known_labels.end(), c)) {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<int> target_vector(const Dataset& ds, const SplitSpec& split, int instance_id) {
  std::vector<int> effective = training_labels(ds, split, instance_id);
  std::vector<int> targets(split.known_labels.size(), -1);
  std::size_t e = 0;
  for (std::size_t k = 0; k < split.known_labels.size(); ++k) {
    if (e < effective.size() && effective[e] == split.known_labels[k]) {
      targets[k] = 1;
      ++e;
    }
  }
  return targets;
}

void validate_split(const Dataset& ds, const SplitSpec& split) {
  const std::size_t n = ds.instances.size();
  std::vector<int> seen(n, 0);
  for (const std::vector<int>* ids : {&split.train_ids, &split.val_ids, &split.test_ids}) {
    for (int i : *ids) {
      if (i < 0 || static_cast<std::size_t>(i) >= n) throw DataError("split: instance id out of range");
      seen[static_cast<std::size_t>(i)] += 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] != 1) {
      throw DataError("split: instance " + std::to_string(i) +
                      (seen[i] == 0 ? " uncovered" : " assigned twice"));
    }
  }

  std::vector<int> all_labels = split.known_labels;
  all_labels.insert(all_labels.end(), split.unseen_labels.begin(), split.unseen_labels.end());
  all_labels = sorted_unique(all_labels);
  if (all_labels.size() != ds.label_count() ||
      split.known_labels.size() + split.unseen_labels.size() != ds.label_count()) {
    throw DataError("split: known/unseen labels do not partition the label collection");
  }

  if (split.mode == SplitMode::kLfs) {
    std::vector<bool> is_unseen(ds.label_count(), false);
    for (int c : split.unseen_labels) is_unseen[static_cast<std::size_t>(c)] = true;
    for (const std::vector<int>* ids : {&split.train_ids, &split.val_ids}) {
      for (int i : *ids) {
        for (int c : ds.instances[static_cast<std::size_t>(i)].labels) {
          if (is_unseen[static_cast<std::size_t>(c)]) {
            throw DataError("lfs split: train/val instance " + std::to_string(i) +
                            " carries unseen label " + std::to_string(c));
          }
        }
      }
    }
    for (int i : split.test_ids) {
      bool has_unseen = false;
      for (int c : ds.instances[static_cast<std::size_t>(i)].labels) {
        if (is_unseen[static_cast<std::size_t>(c)]) has_unseen = true;
      }
      if (!has_unseen) {
        throw DataError("lfs split: test instance " + std::to_string(i) + " has no unseen label");
      }
    }
  }
}

void write_dataset(std::ostream& os, const Dataset& ds) {
  os << "MLZSR v1\n";
  os << ds.label_count() << ' ' << ds.semantic_dim << ' ' << ds.segment_count << ' '
     << ds.feature_dim << ' ' << ds.instances.size() << '\n';
  for (std::size_t c = 0; c < ds.label_count(); ++c) {
    os << c << ' ' << ds.vocabulary[c] << '\n';
  }
  for (std::size_t c = 0; c < ds.label_count(); ++c) {
    for (std::size_t j = 0; j < ds.semantic_dim; ++j) {
      if (j) os << ' ';
      format_double(os, ds.semantics(c, j));
    }
    os << '\n';
  }
  for (const Instance& inst : ds.instances) {
    for (std::size_t k = 0; k < inst.labels.size(); ++k) {
      if (k) os << ' ';
      os << inst.labels[k];
    }
    os << '\n';
    for (std::size_t t = 0; t < ds.segment_count; ++t) {
      for (std::size_t j = 0; j < ds.feature_dim; ++j) {
        if (j) os << ' ';
        format_double(os, inst.segments(t, j));
      }
      os << '\n';
    }
  }
}

Dataset read_dataset(std::istream& is) {
  LineReader r{is};
  std::string magic = r.next("header");
  if (magic != "MLZSR v1") r.fail("bad magic '" + magic + "', expected 'MLZSR v1'");

  std::istringstream hdr(r.next("dimension header"));
  std::size_t labels = 0, d_s = 0, t_count = 0, d_x = 0, n = 0;
  if (!(hdr >> labels >> d_s >> t_count >> d_x >> n)) r.fail("bad dimension header");
  if (labels == 0 || d_s == 0 || t_count == 0 || d_x == 0) r.fail("zero dimension in header");

  Dataset ds;
  ds.semantic_dim = d_s;
  ds.segment_count = t_count;
  ds.feature_dim = d_x;
  ds.vocabulary.resize(labels);
  for (std::size_t c = 0; c < labels; ++c) {
    std::string line = r.next("vocabulary entry");
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos) r.fail("vocabulary entry needs 'id name'");
    char* end = nullptr;
    long id = std::strtol(line.c_str(), &end, 10);
    if (id != static_cast<long>(c)) r.fail("vocabulary ids must be dense and ascending");
    ds.vocabulary[c] = line.substr(sp + 1);
    if (ds.vocabulary[c].empty()) r.fail("empty label name");
  }
  ds.semantics = Matrix(labels, d_s);
  for (std::size_t c = 0; c < labels; ++c) {
    std::vector<double> row = parse_doubles(r, r.next("semantic row"), d_s);
    std::copy(row.begin(), row.end(), ds.semantics.data.begin() + static_cast<std::ptrdiff_t>(c * d_s));
  }
  ds.instances.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> ids = parse_ints(r, r.next("instance label list"));
    if (ids.empty()) r.fail("instance " + std::to_string(i) + " has no labels");
    for (int c : ids) {
      if (c < 0 || static_cast<std::size_t>(c) >= labels) {
        r.fail("label id " + std::to_string(c) + " out of range");
      }
    }
    ds.instances[i].labels = sorted_unique(ids);
    if (ds.instances[i].labels.size() != ids.size()) r.fail("duplicate label in instance");
    ds.instances[i].segments = Matrix(t_count, d_x);
    for (std::size_t t = 0; t < t_count; ++t) {
      std::vector<double> row = parse_doubles(r, r.next("segment row"), d_x);
      std::copy(row.begin(), row.end(),
                ds.instances[i].segments.data.begin() + static_cast<std::ptrdiff_t>(t * d_x));
    }
  }
  return ds;
}

void write_split(std::ostream& os, const SplitSpec& split) {
  os << "MLZSR-SPLIT v1\n";
  os << "mode " << (split.mode == SplitMode::kIfs ? "ifs" : "lfs") << '\n';
  os << "seed " << split.seed << '\n';
  if (split.mode == SplitMode::kIfs) {
    os << "fractions";
    for (int i = 0; i < 3; ++i) {
      os << ' ';
      format_double(os, split.fractions[i]);
    }
    os << '\n';
  } else {
    os << "val_count " << split.val_count << '\n';
  }
  auto emit = [&os](const char* key, const std::vector<int>& ids) {
    os << key;
    for (int v : ids) os << ' ' << v;
    os << '\n';
  };
  emit("known", split.known_labels);
  emit("unseen", split.unseen_labels);
  emit("train", split.train_ids);
  emit("val", split.val_ids);
  emit("test", split.test_ids);
}

SplitSpec read_split(std::istream& is) {
  LineReader r{is};
  std::string magic = r.next("header");
  if (magic != "MLZSR-SPLIT v1") r.fail("bad magic '" + magic + "'");

  SplitSpec split;
  auto expect_key = [&r](const std::string& line, const std::string& key) {
    if (line.rfind(key + " ", 0) != 0 && line != key) {
      r.fail("expected '" + key + "', got '" + line + "'");
    }
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
  };

  std::string mode = expect_key(r.next("mode"), "mode");
  if (mode == "ifs") {
    split.mode = SplitMode::kIfs;
  } else if (mode == "lfs") {
    split.mode = SplitMode::kLfs;
  } else {
    r.fail("unknown split mode '" + mode + "'");
  }
  split.seed = std::strtoull(expect_key(r.next("seed"), "seed").c_str(), nullptr, 10);
  if (split.mode == SplitMode::kIfs) {
    std::istringstream ss(expect_key(r.next("fractions"), "fractions"));
    if (!(ss >> split.fractions[0] >> split.fractions[1] >> split.fractions[2])) {
      r.fail("bad fractions line");
    }
  } else {
    split.val_count = std::strtoull(expect_key(r.next("val_count"), "val_count").c_str(), nullptr, 10);
  }
  auto read_ids = [&](const char* key) {
    std::string rest = expect_key(r.next(key), key);
    std::istringstream ss(rest);
    std::vector<int> ids;
    int v;
    while (ss >> v) ids.push_back(v);
    return ids;
  };
  split.known_labels = read_ids("known");
  split.unseen_labels = read_ids("unseen");
  split.train_ids = read_ids("train");
  split.val_ids = read_ids("val");
  split.test_ids = read_ids("test");
  return split;
}

namespace {

template <typename WriteFn>
void save_text(const std::string& path, WriteFn fn) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  fn(os);
  os.flush();
  if (!os) throw DataError("write to '" + path + "' failed");
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  save_text(path, [&ds](std::ostream& os) { write_dataset(os, ds); });
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open dataset '" + path + "'");
  return read_dataset(is);
}

void save_split(const SplitSpec& split, const std::string& path) {
  save_text(path, [&split](std::ostream& os) { write_split(os, split); });
}

SplitSpec load_split(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open split '" + path + "'");
  return read_split(is);
}

}  // namespace mlzsr
