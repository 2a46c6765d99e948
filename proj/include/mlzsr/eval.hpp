#ifndef MLZSR_EVAL_HPP_
#define MLZSR_EVAL_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mlzsr/matrix.hpp"
#include "mlzsr/rng.hpp"

namespace mlzsr {

enum class ScenarioKind { kGzsl, kKnownOnly, kUnseenOnly };

struct Scenario {
  ScenarioKind kind = ScenarioKind::kGzsl;
  std::vector<int> known_labels;
  std::vector<int> unseen_labels;

  // Candidate labels for this scenario, ascending.
  std::vector<int> candidate_labels() const;
};

std::string scenario_name(ScenarioKind kind);
ScenarioKind parse_scenario(const std::string& name);

// A test fixture after scenario filtering: candidate labels are restricted,
// truth sets are intersected with them, and instances whose truth set becomes
// empty are dropped.
struct EvalFixture {
  std::vector<int> label_ids;               // candidate labels, ascending
  std::vector<int> instance_ids;            // surviving instances
  Matrix scores;                            // |instances| x |labels|
  std::vector<std::vector<int>> truths;     // per surviving instance, sorted
};

// scores_all is N x |C| over the full label collection; truths_all holds each
// instance's ground-truth label set over C.
EvalFixture apply_scenario(const Matrix& scores_all,
                           const std::vector<std::vector<int>>& truths_all,
                           const std::vector<int>& instance_ids, const Scenario& scenario);

// |truth ∩ ranked[0..k)| / k. Throws DataError for k outside [1, |ranked|].
double precision_at_k(const std::vector<int>& truth, const std::vector<int>& ranked,
                      std::size_t k);

// Mean over instances of average precision of the label ranking. Instances
// with empty truth are excluded; all-empty input throws DataError.
double instance_map(const std::vector<std::vector<int>>& truths,
                    const std::vector<std::vector<int>>& rankings);

// Transposed view: average precision of per-label instance rankings, averaged
// over labels with at least one positive instance.
double label_map(const EvalFixture& fixture);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf overall_prf(const std::vector<std::vector<int>>& truths,
                const std::vector<std::vector<int>>& rankings, std::size_t k);

// Per-instance label rankings of a fixture (descending score, ascending id on
// ties).
std::vector<std::vector<int>> fixture_rankings(const EvalFixture& fixture);

struct EvalReport {
  std::string scenario;
  std::size_t k = 5;
  std::size_t instance_count = 0;
  std::size_t label_count = 0;
  double i_map = 0.0;
  double l_map = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Metrics of one fixture at cutoff k.
EvalReport evaluate_fixture(const EvalFixture& fixture, std::size_t k);

struct MetricStats {
  double mean = 0.0;
  double sem = 0.0;
  bool sem_valid = true;
};

struct RgsResult {
  std::size_t trials = 0;
  MetricStats i_map, l_map, precision, recall, f1;
};

// Random-guess baseline: each trial draws i.i.d. uniform scores for every
// (instance, label) pair, applies the scenario and evaluates all metrics.
// SEM = sample stdev / sqrt(trials); a single trial reports SEM 0, flagged.
RgsResult rgs_baseline(const std::vector<std::vector<int>>& truths_all,
                       const std::vector<int>& instance_ids, std::size_t full_label_count,
                       const Scenario& scenario, std::size_t k, std::size_t trials, Rng& rng);

// One metric per line, fixed field order; `mean`/`sem` repeat the value with
// sem 0 for single runs.
void write_report(std::ostream& os, const EvalReport& report);
void write_report_stats(std::ostream& os, const std::string& scenario, std::size_t k,
                        const RgsResult& stats);

}  // namespace mlzsr

#endif  // MLZSR_EVAL_HPP_
