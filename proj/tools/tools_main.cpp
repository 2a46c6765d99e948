// Command-line front end: generate / split / train / eval / fuse / gradcheck.
// Every command resolves its configuration, writes outputs atomically and
// drops a manifest (resolved config, seeds, input/output hashes) next to each
// output so runs can be replayed exactly.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlzsr/baselines.hpp"
#include "mlzsr/checkpoint.hpp"
#include "mlzsr/data.hpp"
#include "mlzsr/errors.hpp"
#include "mlzsr/eval.hpp"
#include "mlzsr/recognize.hpp"
#include "mlzsr/scoredump.hpp"
#include "mlzsr/train.hpp"
#include "mlzsr/verify.hpp"

namespace fs = std::filesystem;
using namespace mlzsr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

bool g_quiet = false;

void note(const std::string& msg) {
  if (!g_quiet) std::cerr << msg << '\n';
}

// ---- config files -------------------------------------------------------

// key = value pairs, '#' comments, optional [section] headers that prefix the
// following keys as "section.key".
std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line, section;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

class ConfigView {
 public:
  explicit ConfigView(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  std::string require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
  }
  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  long long require_int(const std::string& key) const { return to_int(key, require(key)); }
  long long get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : to_int(key, it->second);
  }
  double require_double(const std::string& key) const { return to_double(key, require(key)); }
  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(key, it->second);
  }
  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  static long long to_int(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      long long out = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not an integer: '" + v + "'");
    }
  }
  static double to_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      double out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number: '" + v + "'");
    }
  }
  std::map<std::string, std::string> values_;
};

// ---- output plumbing ----------------------------------------------------

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot hash missing file '" + path + "'");
  std::uint64_t h = 1469598103934665603ULL;
  char buf[1 << 14];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    const std::streamsize n = is.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!is) break;
  }
  return h;
}

template <typename WriteFn>
void atomic_write(const std::string& path, WriteFn fn) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw DataError("cannot open '" + tmp + "' for writing");
    fn(os);
    os.flush();
    if (!os) throw DataError("write to '" + tmp + "' failed");
  }
  fs::rename(tmp, path);
}

struct Manifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // resolved, in order
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void add(const std::string& key, const std::string& value) { config.emplace_back(key, value); }
  void add(const std::string& key, long long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    add(key, std::string(buf));
  }

  void write(const std::string& primary_output) const {
    const std::string path = primary_output + ".manifest";
    atomic_write(path, [this](std::ostream& os) {
      os << "MLZSR-MANIFEST v1\n";
      os << "command " << command << '\n';
      for (const auto& [k, v] : config) os << "config " << k << " = " << v << '\n';
      for (const std::string& in : inputs) {
        os << "input " << in << " fnv64 " << fnv1a64_file(in) << '\n';
      }
      for (const std::string& out : outputs) {
        os << "output " << out << " fnv64 " << fnv1a64_file(out) << '\n';
      }
    });
  }
};

// ---- shared eval helpers --------------------------------------------------

Scenario make_scenario(const SplitSpec& split, const std::string& name) {
  Scenario scenario;
  scenario.kind = parse_scenario(name);
  scenario.known_labels = split.known_labels;
  scenario.unseen_labels = split.unseen_labels;
  return scenario;
}

std::vector<std::vector<int>> ground_truths(const Dataset& ds, const std::vector<int>& ids) {
  std::vector<std::vector<int>> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(ds.instances[static_cast<std::size_t>(id)].labels);
  return out;
}

std::vector<int> all_label_ids(const Dataset& ds) {
  std::vector<int> out(ds.label_count());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = static_cast<int>(c);
  return out;
}

EvalReport report_from_fixture(const EvalFixture& fixture, const std::string& scenario,
                               std::size_t k) {
  EvalReport report = evaluate_fixture(fixture, k);
  report.scenario = scenario;
  return report;
}

// ---- subcommand state -----------------------------------------------------

struct GenerateArgs {
  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
};

struct SplitArgs {
  std::string dataset_path, mode, out_path;
  std::uint64_t seed = 1;
  std::size_t unseen_count = 0;
  std::string unseen_ids;
  std::string fractions = "0.7,0.1,0.2";
  std::size_t val_count = 0;
};

struct TrainArgs {
  std::string dataset_path, split_path, config_path, out_path, log_path, dump_path;
  std::optional<std::uint64_t> seed;
};

struct EvalArgs {
  std::string dataset_path, split_path, checkpoint_path, baseline, scenario = "gzsl";
  std::string out_path, scores_path, pooling = "avg";
  std::size_t k = 5;
  std::size_t lagm_groups = 2;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double soft_margin = 1.0;
};

struct FuseArgs {
  std::string a_path, b_path, dataset_path, split_path, out_path, scores_path;
  std::size_t k = 5;
};

struct GradcheckArgs {
  std::uint64_t seed = 7;
  std::size_t cases = 20;
  double tolerance = 1e-4;
  double loss_tolerance = 1e-6;
};

// ---- subcommands ----------------------------------------------------------

int cmd_generate(const GenerateArgs& args) {
  ConfigView cfg(parse_config_file(args.config_path));
  SyntheticConfig syn;
  syn.label_count = static_cast<std::size_t>(cfg.require_int("labels"));
  syn.cluster_count = static_cast<std::size_t>(cfg.require_int("clusters"));
  syn.train_instances = static_cast<std::size_t>(cfg.require_int("train_instances"));
  syn.val_instances = static_cast<std::size_t>(cfg.require_int("val_instances"));
  syn.test_instances = static_cast<std::size_t>(cfg.require_int("test_instances"));
  syn.segment_count = static_cast<std::size_t>(cfg.require_int("segments"));
  syn.feature_dim = static_cast<std::size_t>(cfg.require_int("feature_dim"));
  syn.semantic_dim = static_cast<std::size_t>(cfg.require_int("semantic_dim"));
  syn.episodes_min = static_cast<std::size_t>(cfg.get_int("episodes_min", 2));
  syn.episodes_max = static_cast<std::size_t>(cfg.get_int("episodes_max", 4));
  syn.labels_min = static_cast<std::size_t>(cfg.get_int("labels_min", 2));
  syn.labels_max = static_cast<std::size_t>(cfg.get_int("labels_max", 4));
  syn.noise_level = cfg.get_double("noise", 0.25);
  syn.semantic_noise = cfg.get_double("semantic_noise", 0.0);
  syn.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  if (args.seed) syn.seed = *args.seed;

  Dataset ds = generate_synthetic(syn);
  atomic_write(args.out_path, [&ds](std::ostream& os) { write_dataset(os, ds); });
  note("generated " + std::to_string(ds.instances.size()) + " instances over " +
       std::to_string(ds.label_count()) + " labels -> " + args.out_path);

  Manifest m;
  m.command = "generate";
  m.add("labels", static_cast<long long>(syn.label_count));
  m.add("clusters", static_cast<long long>(syn.cluster_count));
  m.add("train_instances", static_cast<long long>(syn.train_instances));
  m.add("val_instances", static_cast<long long>(syn.val_instances));
  m.add("test_instances", static_cast<long long>(syn.test_instances));
  m.add("segments", static_cast<long long>(syn.segment_count));
  m.add("feature_dim", static_cast<long long>(syn.feature_dim));
  m.add("semantic_dim", static_cast<long long>(syn.semantic_dim));
  m.add("episodes_min", static_cast<long long>(syn.episodes_min));
  m.add("episodes_max", static_cast<long long>(syn.episodes_max));
  m.add("labels_min", static_cast<long long>(syn.labels_min));
  m.add("labels_max", static_cast<long long>(syn.labels_max));
  m.add("noise", syn.noise_level);
  m.add("semantic_noise", syn.semantic_noise);
  m.add("seed", syn.seed);
  m.inputs.push_back(args.config_path);
  m.outputs.push_back(args.out_path);
  m.write(args.out_path);
  return kExitOk;
}

long long parse_ll(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": '" + tok + "' is not an integer");
  }
}

double parse_dbl(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": '" + tok + "' is not a number");
  }
}

std::vector<int> resolve_unseen(const Dataset& ds, const SplitArgs& args, Rng& rng) {
  if (!args.unseen_ids.empty()) {
    std::vector<int> ids;
    std::istringstream ss(args.unseen_ids);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) ids.push_back(static_cast<int>(parse_ll(tok, "split --unseen-ids")));
    }
    return ids;
  }
  if (args.unseen_count == 0) {
    throw ConfigError("split: provide --unseen <count> or --unseen-ids <list>");
  }
  if (args.unseen_count >= ds.label_count()) {
    throw ConfigError("split: --unseen must leave at least one known label");
  }
  std::vector<int> all = all_label_ids(ds);
  rng.shuffle(all);
  std::vector<int> ids(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(args.unseen_count));
  std::sort(ids.begin(), ids.end());
  return ids;
}

int cmd_split(const SplitArgs& args) {
  Dataset ds = load_dataset(args.dataset_path);
  Rng rng(args.seed);
  std::vector<int> unseen = resolve_unseen(ds, args, rng);

  SplitSpec split;
  if (args.mode == "ifs") {
    double fr[3] = {0, 0, 0};
    std::istringstream ss(args.fractions);
    std::string tok;
    int i = 0;
    while (std::getline(ss, tok, ',') && i < 3) fr[i++] = parse_dbl(tok, "split --fractions");
    if (i != 3) throw ConfigError("split: --fractions needs three comma-separated values");
    split = make_ifs_split(ds, unseen, fr, args.seed);
  } else if (args.mode == "lfs") {
    split = make_lfs_split(ds, unseen, args.val_count, args.seed);
  } else {
    throw ConfigError("split: mode must be ifs or lfs");
  }
  validate_split(ds, split);
  atomic_write(args.out_path, [&split](std::ostream& os) { write_split(os, split); });
  note("split " + args.mode + ": train=" + std::to_string(split.train_ids.size()) +
       " val=" + std::to_string(split.val_ids.size()) +
       " test=" + std::to_string(split.test_ids.size()) + " -> " + args.out_path);

  Manifest m;
  m.command = "split";
  m.add("mode", args.mode);
  m.add("seed", args.seed);
  {
    std::ostringstream ss;
    for (std::size_t i = 0; i < unseen.size(); ++i) ss << (i ? "," : "") << unseen[i];
    m.add("unseen", ss.str());
  }
  if (args.mode == "ifs") m.add("fractions", args.fractions);
  if (args.mode == "lfs") m.add("val_count", static_cast<long long>(args.val_count));
  m.inputs.push_back(args.dataset_path);
  m.outputs.push_back(args.out_path);
  m.write(args.out_path);
  return kExitOk;
}

TrainConfig train_config_from_file(const std::string& path, Dataset& ds,
                                   std::optional<std::uint64_t> seed_override, Manifest& m) {
  ConfigView cfg(path.empty() ? std::map<std::string, std::string>{} : parse_config_file(path));
  TrainConfig tc;
  const std::string loss = cfg.get("loss", "ranknet");
  if (loss == "ranknet") {
    tc.loss = LossKind::kRankNet;
  } else if (loss == "hinge") {
    tc.loss = LossKind::kHinge;
  } else {
    throw ConfigError("train: loss must be ranknet or hinge, got '" + loss + "'");
  }
  tc.margin = cfg.get_double("margin", 1.0);
  tc.lr_visual = cfg.get_double("lr_visual", 1e-2);
  tc.lr_semantic = cfg.get_double("lr_semantic", 1e-3);
  tc.batch_size = static_cast<std::size_t>(cfg.get_int("batch", 32));
  tc.d_e = static_cast<std::size_t>(cfg.get_int("d_e", 24));
  tc.n1 = static_cast<std::size_t>(cfg.get_int("n1", 32));
  tc.n2 = static_cast<std::size_t>(cfg.get_int("n2", 32));
  tc.n1s = static_cast<std::size_t>(cfg.get_int("n1s", 32));
  tc.dropout_rate = cfg.get_double("dropout", 0.0);
  tc.patience = static_cast<std::size_t>(cfg.get_int("patience", 10));
  tc.max_rounds = static_cast<std::size_t>(cfg.get_int("max_rounds", 50));
  tc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  if (seed_override) tc.seed = *seed_override;

  const std::string model = cfg.get("model", "full");
  if (model == "full") {
    tc.model = ModelKind::kFull;
  } else if (model == "nrc") {
    tc.model = ModelKind::kNrc;
  } else if (model == "wse") {
    tc.model = ModelKind::kWse;
  } else {
    throw ConfigError("train: model must be full, nrc or wse, got '" + model + "'");
  }
  const std::string reg = cfg.get("regularizer", "softplus");
  if (reg == "softplus") {
    tc.ranknet_regularizer = RegularizerForm::kSoftplus;
  } else if (reg == "literal") {
    tc.ranknet_regularizer = RegularizerForm::kLiteral;
  } else {
    throw ConfigError("train: regularizer must be softplus or literal");
  }

  m.add("loss", loss);
  m.add("margin", tc.margin);
  m.add("lr_visual", tc.lr_visual);
  m.add("lr_semantic", tc.lr_semantic);
  m.add("batch", static_cast<long long>(tc.batch_size));
  m.add("d_e", static_cast<long long>(tc.d_e));
  m.add("n1", static_cast<long long>(tc.n1));
  m.add("n2", static_cast<long long>(tc.n2));
  m.add("n1s", static_cast<long long>(tc.n1s));
  m.add("dropout", tc.dropout_rate);
  m.add("patience", static_cast<long long>(tc.patience));
  m.add("max_rounds", static_cast<long long>(tc.max_rounds));
  m.add("seed", tc.seed);
  m.add("model", model);
  m.add("regularizer", reg);

  // Randomized label representations replace the semantic table up front;
  // the checkpoint records the seed so evaluation can rebuild the table.
  const std::string semantics = cfg.get("semantics", "table");
  if (semantics == "random") {
    const std::uint64_t sem_seed = static_cast<std::uint64_t>(cfg.get_int("semantics_seed", 1));
    ds = with_semantics(ds, randomize_label_reps(ds.label_count(), ds.semantic_dim, sem_seed));
    m.add("semantics", "random");
    m.add("semantics_seed", sem_seed);
  } else if (semantics == "table") {
    m.add("semantics", "table");
  } else {
    throw ConfigError("train: semantics must be table or random");
  }
  return tc;
}

int cmd_train(const TrainArgs& args) {
  Dataset ds = load_dataset(args.dataset_path);
  SplitSpec split = load_split(args.split_path);
  validate_split(ds, split);

  Manifest m;
  m.command = "train";
  const bool randomized = [&] {
    if (args.config_path.empty()) return false;
    auto raw = parse_config_file(args.config_path);
    auto it = raw.find("semantics");
    return it != raw.end() && it->second == "random";
  }();
  std::uint64_t sem_seed = 0;
  if (randomized) {
    ConfigView cfg(parse_config_file(args.config_path));
    sem_seed = static_cast<std::uint64_t>(cfg.get_int("semantics_seed", 1));
  }
  TrainConfig tc = train_config_from_file(args.config_path, ds, args.seed, m);

  std::ofstream log_stream;
  if (!args.log_path.empty()) {
    log_stream.open(args.log_path + ".tmp");
    if (!log_stream) throw DataError("cannot open training log '" + args.log_path + "'");
  }
  TrainLogger logger = [&](const RoundRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "round=%zu train_loss=%.10f semantic_loss=%.10f val_imap=%.10f",
                  r.round, r.train_loss, r.semantic_loss, r.val_imap);
    if (log_stream.is_open()) log_stream << buf << '\n';
    note(buf);
  };

  Checkpoint ckpt = alternate_train(ds, split, tc, logger);
  ckpt.randomized_semantics = randomized;
  ckpt.semantics_seed = sem_seed;

  if (log_stream.is_open()) {
    log_stream.flush();
    log_stream.close();
    fs::rename(args.log_path + ".tmp", args.log_path);
  }
  atomic_write(args.out_path, [&ckpt](std::ostream& os) { write_checkpoint(os, ckpt); });
  if (!args.dump_path.empty()) {
    atomic_write(args.dump_path, [&ckpt](std::ostream& os) { dump_checkpoint(os, ckpt); });
  }
  note("best round " + std::to_string(ckpt.round) + " val I-MAP " +
       std::to_string(ckpt.best_val_imap) + " -> " + args.out_path);

  m.inputs.push_back(args.dataset_path);
  m.inputs.push_back(args.split_path);
  if (!args.config_path.empty()) m.inputs.push_back(args.config_path);
  m.outputs.push_back(args.out_path);
  if (!args.log_path.empty()) m.outputs.push_back(args.log_path);
  m.write(args.out_path);
  return kExitOk;
}

Pooling parse_pooling(const std::string& name) {
  if (name == "avg") return Pooling::kAverage;
  if (name == "max") return Pooling::kMax;
  if (name == "lagm") return Pooling::kLagm;
  throw ConfigError("eval: pooling must be avg, max or lagm");
}

int cmd_eval(const EvalArgs& args) {
  Dataset ds = load_dataset(args.dataset_path);
  SplitSpec split = load_split(args.split_path);
  validate_split(ds, split);
  const Scenario scenario = make_scenario(split, args.scenario);
  const std::vector<int> all_labels = all_label_ids(ds);
  const std::vector<std::vector<int>> truths = ground_truths(ds, split.test_ids);

  Manifest m;
  m.command = "eval";
  m.add("scenario", args.scenario);
  m.add("k", static_cast<long long>(args.k));

  if (!args.checkpoint_path.empty() && !args.baseline.empty()) {
    throw ConfigError("eval: give either --checkpoint or --baseline, not both");
  }

  if (args.baseline == "rgs") {
    Rng rng(args.seed);
    RgsResult stats = rgs_baseline(truths, split.test_ids, ds.label_count(), scenario, args.k,
                                   args.trials, rng);
    atomic_write(args.out_path, [&](std::ostream& os) {
      write_report_stats(os, args.scenario, args.k, stats);
    });
    m.add("baseline", "rgs");
    m.add("trials", static_cast<long long>(args.trials));
    m.add("seed", args.seed);
    m.inputs = {args.dataset_path, args.split_path};
    m.outputs = {args.out_path};
    m.write(args.out_path);
    note("rgs i_map mean " + std::to_string(stats.i_map.mean) + " sem " +
         std::to_string(stats.i_map.sem));
    return kExitOk;
  }

  Matrix scores_all;
  if (!args.baseline.empty()) {
    // comparison methods fit on instance-level training features
    Matrix features = instance_features(ds, split.train_ids);
    std::vector<std::vector<int>> train_labels;
    for (int id : split.train_ids) train_labels.push_back(training_labels(ds, split, id));
    LinearFitOptions opts;
    opts.lambda = lambda_from_soft_margin(args.soft_margin, split.train_ids.size());
    Matrix test_features = instance_features(ds, split.test_ids);
    scores_all = Matrix(split.test_ids.size(), ds.label_count());

    if (args.baseline == "dsp") {
      // targets: mean semantic vector over the visible labels; instances with
      // no visible label cannot supply a regression target and are skipped
      std::vector<std::size_t> usable;
      for (std::size_t i = 0; i < train_labels.size(); ++i) {
        if (!train_labels[i].empty()) usable.push_back(i);
      }
      if (usable.empty()) throw DataError("dsp: no training instance has visible labels");
      Matrix x(usable.size(), ds.feature_dim);
      Matrix t(usable.size(), ds.semantic_dim);
      for (std::size_t r = 0; r < usable.size(); ++r) {
        const std::size_t i = usable[r];
        std::copy(features.row(i).begin(), features.row(i).end(),
                  x.data.begin() + static_cast<std::ptrdiff_t>(r * x.cols));
        for (int c : train_labels[i]) {
          for (std::size_t j = 0; j < ds.semantic_dim; ++j) {
            t(r, j) += ds.semantics(static_cast<std::size_t>(c), j) /
                       static_cast<double>(train_labels[i].size());
          }
        }
      }
      DspModel model = dsp_fit(x, t, opts);
      for (std::size_t i = 0; i < split.test_ids.size(); ++i) {
        std::vector<double> s = dsp_predict(model, test_features.row(i), ds, all_labels);
        std::copy(s.begin(), s.end(),
                  scores_all.data.begin() + static_cast<std::ptrdiff_t>(i * scores_all.cols));
      }
    } else if (args.baseline == "conse") {
      ConseModel model = conse_fit(features, train_labels, split.known_labels, opts);
      for (std::size_t i = 0; i < split.test_ids.size(); ++i) {
        std::vector<double> s = conse_predict(model, test_features.row(i), ds, all_labels);
        std::copy(s.begin(), s.end(),
                  scores_all.data.begin() + static_cast<std::ptrdiff_t>(i * scores_all.cols));
      }
    } else if (args.baseline == "costa") {
      CostaModel model = costa_fit(features, train_labels, split.known_labels, opts);
      Matrix betas = costa_betas(ds, split.known_labels, split.unseen_labels);
      for (std::size_t i = 0; i < split.test_ids.size(); ++i) {
        std::vector<double> s =
            costa_predict(model, test_features.row(i), all_labels, betas, split.unseen_labels);
        std::copy(s.begin(), s.end(),
                  scores_all.data.begin() + static_cast<std::ptrdiff_t>(i * scores_all.cols));
      }
    } else {
      throw ConfigError("eval: unknown baseline '" + args.baseline +
                        "' (expected rgs, dsp, conse or costa)");
    }
    m.add("baseline", args.baseline);
    m.add("soft_margin", args.soft_margin);
  } else {
    if (args.checkpoint_path.empty()) {
      throw ConfigError("eval: --checkpoint or --baseline is required");
    }
    Checkpoint ckpt = load_checkpoint(args.checkpoint_path);
    if (ckpt.randomized_semantics) {
      ds = with_semantics(ds,
                          randomize_label_reps(ds.label_count(), ds.semantic_dim, ckpt.semantics_seed));
    }
    const SemanticModel* sem = ckpt.has_semantic_model() ? &ckpt.semantic : nullptr;
    scores_all = score_instances(ckpt.visual, sem, ds, split.test_ids, all_labels,
                                 parse_pooling(args.pooling), args.lagm_groups);
    m.add("checkpoint", args.checkpoint_path);
    m.add("pooling", args.pooling);
    if (args.pooling == "lagm") m.add("lagm_groups", static_cast<long long>(args.lagm_groups));
  }

  EvalFixture fixture = apply_scenario(scores_all, truths, split.test_ids, scenario);
  EvalReport report = report_from_fixture(fixture, args.scenario, args.k);
  atomic_write(args.out_path, [&report](std::ostream& os) { write_report(os, report); });
  note("i_map " + std::to_string(report.i_map) + " l_map " + std::to_string(report.l_map));

  if (!args.scores_path.empty()) {
    ScoreDump dump;
    dump.scenario = args.scenario;
    dump.k = args.k;
    dump.label_ids = fixture.label_ids;
    dump.instance_ids = fixture.instance_ids;
    dump.scores = normalize_scores(fixture.scores);
    atomic_write(args.scores_path, [&dump](std::ostream& os) { write_score_dump(os, dump); });
    m.outputs.push_back(args.scores_path);
  }
  m.inputs.insert(m.inputs.begin(), {args.dataset_path, args.split_path});
  if (!args.checkpoint_path.empty()) m.inputs.push_back(args.checkpoint_path);
  m.outputs.insert(m.outputs.begin(), args.out_path);
  m.write(args.out_path);
  return kExitOk;
}

int cmd_fuse(const FuseArgs& fargs) {
  FuseArgs args = fargs;
  if (args.scores_path.empty()) args.scores_path = args.out_path + ".scores";
  ScoreDump a = load_score_dump(args.a_path);
  ScoreDump b = load_score_dump(args.b_path);
  if (a.label_ids != b.label_ids) throw DataError("fuse: label collections differ");
  if (a.instance_ids != b.instance_ids) throw DataError("fuse: instance sets differ");
  if (a.scenario != b.scenario) throw DataError("fuse: scenarios differ");

  Dataset ds = load_dataset(args.dataset_path);
  SplitSpec split = load_split(args.split_path);
  validate_split(ds, split);

  Matrix fused = fuse_scores(a.scores, b.scores);

  EvalFixture fixture;
  fixture.label_ids = a.label_ids;
  fixture.instance_ids = a.instance_ids;
  fixture.scores = fused;
  std::vector<int> candidate = a.label_ids;
  for (int id : a.instance_ids) {
    std::vector<int> truth;
    for (int c : ds.instances[static_cast<std::size_t>(id)].labels) {
      if (std::binary_search(candidate.begin(), candidate.end(), c)) truth.push_back(c);
    }
    fixture.truths.push_back(std::move(truth));
  }

  EvalReport report = report_from_fixture(fixture, a.scenario, args.k);
  atomic_write(args.out_path, [&report](std::ostream& os) { write_report(os, report); });
  note("fused i_map " + std::to_string(report.i_map));

  Manifest m;
  m.command = "fuse";
  m.add("scenario", a.scenario);
  m.add("k", static_cast<long long>(args.k));
  m.inputs = {args.a_path, args.b_path, args.dataset_path, args.split_path};
  m.outputs = {args.out_path};
  ScoreDump out_dump = a;
  out_dump.scores = fused;
  atomic_write(args.scores_path, [&out_dump](std::ostream& os) { write_score_dump(os, out_dump); });
  m.outputs.push_back(args.scores_path);
  m.write(args.out_path);
  return kExitOk;
}

int cmd_gradcheck(const GradcheckArgs& args) {
  GradCheckOptions opts;
  opts.seed = args.seed;
  opts.cases_per_component = args.cases;
  opts.model_tolerance = args.tolerance;
  opts.loss_tolerance = args.loss_tolerance;
  bool all_pass = true;
  for (const GradCheckResult& r : run_gradient_checks(opts)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-26s cases=%zu max_rel_err=%.3e tol=%.0e %s",
                  r.component.c_str(), r.cases, r.max_rel_err, r.tolerance,
                  r.pass ? "PASS" : "FAIL");
    std::cout << buf << '\n';
    all_pass = all_pass && r.pass;
  }
  if (!all_pass) {
    std::cerr << "gradient check failed\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-label zero-shot action recognition experiments"};
  app.require_subcommand(1);

  GenerateArgs gen;
  SplitArgs spl;
  TrainArgs trn;
  EvalArgs evl;
  FuseArgs fus;
  GradcheckArgs grd;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;

  CLI::App* c_gen = app.add_subcommand("generate", "generate a synthetic dataset");
  c_gen->add_option("--config", gen.config_path, "generator config file")->required();
  c_gen->add_option("--out", gen.out_path, "output dataset path")->required();
  c_gen->add_option("--seed", seed_flag, "override the config seed");

  CLI::App* c_spl = app.add_subcommand("split", "build an IFS or LFS split");
  c_spl->add_option("--dataset", spl.dataset_path)->required();
  c_spl->add_option("--mode", spl.mode, "ifs or lfs")->required();
  c_spl->add_option("--seed", spl.seed);
  c_spl->add_option("--unseen", spl.unseen_count, "number of random unseen labels");
  c_spl->add_option("--unseen-ids", spl.unseen_ids, "explicit comma-separated unseen label ids");
  c_spl->add_option("--fractions", spl.fractions, "ifs train,val,test fractions");
  c_spl->add_option("--val-count", spl.val_count, "lfs validation instance count");
  c_spl->add_option("--out", spl.out_path)->required();

  CLI::App* c_trn = app.add_subcommand("train", "alternate-train a model");
  c_trn->add_option("--dataset", trn.dataset_path)->required();
  c_trn->add_option("--split", trn.split_path)->required();
  c_trn->add_option("--config", trn.config_path, "training config file");
  c_trn->add_option("--out", trn.out_path, "checkpoint output")->required();
  c_trn->add_option("--log", trn.log_path, "training log output");
  c_trn->add_option("--dump", trn.dump_path, "textual checkpoint dump output");
  c_trn->add_option("--seed", seed_flag, "override the config seed");

  CLI::App* c_evl = app.add_subcommand("eval", "evaluate a checkpoint or baseline");
  c_evl->add_option("--dataset", evl.dataset_path)->required();
  c_evl->add_option("--split", evl.split_path)->required();
  c_evl->add_option("--checkpoint", evl.checkpoint_path);
  c_evl->add_option("--baseline", evl.baseline, "rgs, dsp, conse or costa");
  c_evl->add_option("--scenario", evl.scenario, "gzsl, known or unseen");
  c_evl->add_option("--k", evl.k, "cutoff for precision/recall/f1");
  c_evl->add_option("--out", evl.out_path, "report output")->required();
  c_evl->add_option("--scores", evl.scores_path, "normalized score dump output");
  c_evl->add_option("--pooling", evl.pooling, "avg, max or lagm");
  c_evl->add_option("--groups", evl.lagm_groups, "lagm group count");
  c_evl->add_option("--trials", evl.trials, "rgs trial count");
  c_evl->add_option("--seed", evl.seed, "rgs seed");
  c_evl->add_option("--soft-margin", evl.soft_margin, "soft margin C for baseline fits");

  CLI::App* c_fus = app.add_subcommand("fuse", "fuse two normalized score dumps");
  c_fus->add_option("--a", fus.a_path)->required();
  c_fus->add_option("--b", fus.b_path)->required();
  c_fus->add_option("--dataset", fus.dataset_path)->required();
  c_fus->add_option("--split", fus.split_path)->required();
  c_fus->add_option("--k", fus.k);
  c_fus->add_option("--out", fus.out_path, "report output")->required();
  c_fus->add_option("--scores", fus.scores_path, "fused score dump output");

  CLI::App* c_grd = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  c_grd->add_option("--seed", grd.seed);
  c_grd->add_option("--cases", grd.cases, "cases per component");
  c_grd->add_option("--tolerance", grd.tolerance, "model-path tolerance");
  c_grd->add_option("--loss-tolerance", grd.loss_tolerance, "loss tolerance");

  app.add_flag("--quiet", g_quiet, "suppress progress notes");
  for (CLI::App* sub : {c_gen, c_spl, c_trn, c_evl, c_fus, c_grd}) {
    sub->add_flag("--quiet", g_quiet, "suppress progress notes");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  for (CLI::App* sub : {c_gen, c_trn}) {
    if (sub->parsed() && sub->count("--seed") > 0) seed_set = true;
  }
  if (seed_set) {
    gen.seed = seed_flag;
    trn.seed = seed_flag;
  }

  try {
    if (c_gen->parsed()) return cmd_generate(gen);
    if (c_spl->parsed()) return cmd_split(spl);
    if (c_trn->parsed()) return cmd_train(trn);
    if (c_evl->parsed()) return cmd_eval(evl);
    if (c_fus->parsed()) return cmd_fuse(fus);
    if (c_grd->parsed()) return cmd_gradcheck(grd);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SplitError& e) {
    std::cerr << "split error: " << e.what() << '\n';
    return kExitData;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}
