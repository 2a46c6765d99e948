// Brute-force re-implementations of the evaluation metrics, written directly
// from their defining sums with no shared code with the library. Test-only.
#ifndef MLZSR_TESTS_METRIC_ORACLE_HPP_
#define MLZSR_TESTS_METRIC_ORACLE_HPP_

#include <cstddef>
#include <set>
#include <vector>

namespace metric_oracle {

inline double p_at_k(const std::set<int>& truth, const std::vector<int>& ranked, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < k; ++r) {
    if (truth.count(ranked[r]) > 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

inline double average_precision(const std::set<int>& truth, const std::vector<int>& ranked) {
  double total = 0.0;
  for (std::size_t c = 1; c <= ranked.size(); ++c) {
    const int label_at_rank = ranked[c - 1];
    const double indicator = truth.count(label_at_rank) > 0 ? 1.0 : 0.0;
    total += p_at_k(truth, ranked, c) * indicator;
  }
  return total / static_cast<double>(truth.size());
}

inline double i_map(const std::vector<std::set<int>>& truths,
                    const std::vector<std::vector<int>>& rankings) {
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i].empty()) continue;
    total += average_precision(truths[i], rankings[i]);
    ++counted;
  }
  return total / static_cast<double>(counted);
}

// positives[c] = set of instance indices whose truth contains label c;
// instance_rankings[c] = instance indices ordered by descending score for c.
inline double l_map(const std::vector<std::set<int>>& positives,
                    const std::vector<std::vector<int>>& instance_rankings) {
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < positives.size(); ++c) {
    if (positives[c].empty()) continue;
    total += average_precision(positives[c], instance_rankings[c]);
    ++counted;
  }
  return total / static_cast<double>(counted);
}

struct Prf {
  double precision;
  double recall;
  double f1;
};

inline Prf overall_prf(const std::vector<std::set<int>>& truths,
                       const std::vector<std::vector<int>>& rankings, std::size_t k) {
  double hit_sum = 0.0;
  double truth_sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i].empty()) continue;
    for (std::size_t r = 0; r < k && r < rankings[i].size(); ++r) {
      if (truths[i].count(rankings[i][r]) > 0) hit_sum += 1.0;
    }
    truth_sum += static_cast<double>(truths[i].size());
    ++counted;
  }
  Prf out{};
  out.precision = hit_sum / (static_cast<double>(k) * static_cast<double>(counted));
  out.recall = hit_sum / truth_sum;
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

}  // namespace metric_oracle

#endif  // MLZSR_TESTS_METRIC_ORACLE_HPP_
