#include "mlzsr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "mlzsr/errors.hpp"
#include "mlzsr/scoring.hpp"

namespace mlzsr {
namespace {

bool contains(const std::vector<int>& sorted, int value) {
  return std::binary_search(sorted.begin(), sorted.end(), value);
}

double average_precision(const std::vector<int>& truth, const std::vector<int>& ranking) {
  std::size_t hits = 0;
  double ap = 0.0;
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    if (contains(truth, ranking[r])) {
      ++hits;
      ap += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return ap / static_cast<double>(truth.size());
}

double sample_sem(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

MetricStats make_stats(const std::vector<double>& values) {
  MetricStats s;
  double mean = 0.0;
  for (double v : values) mean += v;
  s.mean = mean / static_cast<double>(values.size());
  if (values.size() > 1) {
    s.sem = sample_sem(values);
    s.sem_valid = true;
  } else {
    s.sem = 0.0;
    s.sem_valid = false;
  }
  return s;
}

void write_metric_line(std::ostream& os, const std::string& scenario, const char* metric,
                       std::size_t k, double value, double mean, double sem, bool sem_valid) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "scenario=%s metric=%s k=%zu value=%.10f mean=%.10f sem=%.10f sem_valid=%d",
                scenario.c_str(), metric, k, value, mean, sem, sem_valid ? 1 : 0);
  os << buf << '\n';
}

}  // namespace

std::vector<int> Scenario::candidate_labels() const {
  std::vector<int> out;
  switch (kind) {
    case ScenarioKind::kKnownOnly:
      out = known_labels;
      break;
    case ScenarioKind::kUnseenOnly:
      out = unseen_labels;
      break;
    case ScenarioKind::kGzsl:
      out = known_labels;
      out.insert(out.end(), unseen_labels.begin(), unseen_labels.end());
      std::sort(out.begin(), out.end());
      break;
  }
  return out;
}

std::string scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kGzsl:
      return "gzsl";
    case ScenarioKind::kKnownOnly:
      return "known";
    case ScenarioKind::kUnseenOnly:
      return "unseen";
  }
  return "?";
}

ScenarioKind parse_scenario(const std::string& name) {
  if (name == "gzsl") return ScenarioKind::kGzsl;
  if (name == "known") return ScenarioKind::kKnownOnly;
  if (name == "unseen") return ScenarioKind::kUnseenOnly;
  throw ConfigError("unknown scenario '" + name + "' (expected gzsl|known|unseen)");
}

EvalFixture apply_scenario(const Matrix& scores_all,
                           const std::vector<std::vector<int>>& truths_all,
                           const std::vector<int>& instance_ids, const Scenario& scenario) {
  if (scores_all.rows != truths_all.size() || scores_all.rows != instance_ids.size()) {
    throw ShapeError("apply_scenario: instance count mismatch");
  }
  EvalFixture out;
  out.label_ids = scenario.candidate_labels();

  std::vector<std::size_t> kept;
  std::vector<std::vector<int>> kept_truths;
  for (std::size_t i = 0; i < truths_all.size(); ++i) {
    std::vector<int> filtered;
    for (int c : truths_all[i]) {
      if (contains(out.label_ids, c)) filtered.push_back(c);
    }
    if (filtered.empty()) continue;
    kept.push_back(i);
    kept_truths.push_back(std::move(filtered));
  }

  out.scores = Matrix(kept.size(), out.label_ids.size());
  out.truths = std::move(kept_truths);
  out.instance_ids.reserve(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    out.instance_ids.push_back(instance_ids[kept[r]]);
    for (std::size_t j = 0; j < out.label_ids.size(); ++j) {
      out.scores(r, j) = scores_all(kept[r], static_cast<std::size_t>(out.label_ids[j]));
    }
  }
  return out;
}

double precision_at_k(const std::vector<int>& truth, const std::vector<int>& ranked,
                      std::size_t k) {
  if (k < 1 || k > ranked.size()) {
    throw DataError("precision_at_k: k=" + std::to_string(k) + " outside [1, " +
                    std::to_string(ranked.size()) + "]");
  }
  std::size_t hits = 0;
  for (std::size_t r = 0; r < k; ++r) {
    if (contains(truth, ranked[r])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double instance_map(const std::vector<std::vector<int>>& truths,
                    const std::vector<std::vector<int>>& rankings) {
  if (truths.size() != rankings.size()) throw ShapeError("instance_map: size mismatch");
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i].empty()) continue;
    total += average_precision(truths[i], rankings[i]);
    ++counted;
  }
  if (counted == 0) throw DataError("instance_map: no instance has ground-truth labels");
  return total / static_cast<double>(counted);
}

double label_map(const EvalFixture& fixture) {
  const std::size_t n = fixture.scores.rows;
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t j = 0; j < fixture.label_ids.size(); ++j) {
    const int label = fixture.label_ids[j];
    std::vector<int> positives;
    for (std::size_t i = 0; i < n; ++i) {
      if (contains(fixture.truths[i], label)) positives.push_back(static_cast<int>(i));
    }
    if (positives.empty()) continue;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double sa = fixture.scores(a, j);
      const double sb = fixture.scores(b, j);
      if (sa != sb) return sa > sb;
      return a < b;
    });
    std::size_t hits = 0;
    double ap = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (std::binary_search(positives.begin(), positives.end(), static_cast<int>(order[r]))) {
        ++hits;
        ap += static_cast<double>(hits) / static_cast<double>(r + 1);
      }
    }
    total += ap / static_cast<double>(positives.size());
    ++counted;
  }
  if (counted == 0) throw DataError("label_map: no label has positive instances");
  return total / static_cast<double>(counted);
}

Prf overall_prf(const std::vector<std::vector<int>>& truths,
                const std::vector<std::vector<int>>& rankings, std::size_t k) {
  if (truths.size() != rankings.size()) throw ShapeError("overall_prf: size mismatch");
  if (k < 1) throw DataError("overall_prf: k must be >= 1");
  std::size_t total_hits = 0;
  std::size_t total_truth = 0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i].empty()) continue;
    const std::size_t kk = std::min(k, rankings[i].size());
    for (std::size_t r = 0; r < kk; ++r) {
      if (contains(truths[i], rankings[i][r])) ++total_hits;
    }
    total_truth += truths[i].size();
    ++counted;
  }
  if (counted == 0) throw DataError("overall_prf: no instance has ground-truth labels");
  Prf out;
  out.precision = static_cast<double>(total_hits) /
                  (static_cast<double>(k) * static_cast<double>(counted));
  out.recall = static_cast<double>(total_hits) / static_cast<double>(total_truth);
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

std::vector<std::vector<int>> fixture_rankings(const EvalFixture& fixture) {
  std::vector<std::vector<int>> rankings(fixture.scores.rows);
  for (std::size_t i = 0; i < fixture.scores.rows; ++i) {
    RankedLabels ranked = rank_labels(fixture.scores.row(i), fixture.label_ids);
    rankings[i] = std::move(ranked.ids);
  }
  return rankings;
}

EvalReport evaluate_fixture(const EvalFixture& fixture, std::size_t k) {
  EvalReport report;
  report.k = k;
  report.instance_count = fixture.scores.rows;
  report.label_count = fixture.label_ids.size();
  std::vector<std::vector<int>> rankings = fixture_rankings(fixture);
  report.i_map = instance_map(fixture.truths, rankings);
  report.l_map = label_map(fixture);
  Prf prf = overall_prf(fixture.truths, rankings, k);
  report.precision = prf.precision;
  report.recall = prf.recall;
  report.f1 = prf.f1;
  return report;
}

RgsResult rgs_baseline(const std::vector<std::vector<int>>& truths_all,
                       const std::vector<int>& instance_ids, std::size_t full_label_count,
                       const Scenario& scenario, std::size_t k, std::size_t trials, Rng& rng) {
  if (trials < 1) throw ConfigError("rgs_baseline: need at least one trial");
  std::vector<double> v_imap, v_lmap, v_p, v_r, v_f1;
  v_imap.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Matrix scores(truths_all.size(), full_label_count);
    for (double& s : scores.data) s = rng.next_double();
    EvalFixture fixture = apply_scenario(scores, truths_all, instance_ids, scenario);
    EvalReport rep = evaluate_fixture(fixture, k);
    v_imap.push_back(rep.i_map);
    v_lmap.push_back(rep.l_map);
    v_p.push_back(rep.precision);
    v_r.push_back(rep.recall);
    v_f1.push_back(rep.f1);
  }
  RgsResult out;
  out.trials = trials;
  out.i_map = make_stats(v_imap);
  out.l_map = make_stats(v_lmap);
  out.precision = make_stats(v_p);
  out.recall = make_stats(v_r);
  out.f1 = make_stats(v_f1);
  return out;
}

void write_report(std::ostream& os, const EvalReport& report) {
  os << "MLZSR-REPORT v1\n";
  os << "instances=" << report.instance_count << " labels=" << report.label_count << '\n';
  write_metric_line(os, report.scenario, "i_map", report.k, report.i_map, report.i_map, 0.0, true);
  write_metric_line(os, report.scenario, "l_map", report.k, report.l_map, report.l_map, 0.0, true);
  write_metric_line(os, report.scenario, "precision", report.k, report.precision, report.precision,
                    0.0, true);
  write_metric_line(os, report.scenario, "recall", report.k, report.recall, report.recall, 0.0, true);
  write_metric_line(os, report.scenario, "f1", report.k, report.f1, report.f1, 0.0, true);
}

void write_report_stats(std::ostream& os, const std::string& scenario, std::size_t k,
                        const RgsResult& stats) {
  os << "MLZSR-REPORT v1\n";
  os << "trials=" << stats.trials << '\n';
  const struct {
    const char* name;
    const MetricStats* s;
  } rows[] = {{"i_map", &stats.i_map},
              {"l_map", &stats.l_map},
              {"precision", &stats.precision},
              {"recall", &stats.recall},
              {"f1", &stats.f1}};
  for (const auto& row : rows) {
    write_metric_line(os, scenario, row.name, k, row.s->mean, row.s->mean, row.s->sem,
                      row.s->sem_valid);
  }
}

}  // namespace mlzsr
