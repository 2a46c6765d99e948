#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "metric_oracle.hpp"
#include "mlzsr/errors.hpp"
#include "mlzsr/eval.hpp"
#include "mlzsr/rng.hpp"

using namespace mlzsr;

namespace {

std::vector<std::vector<int>> as_rankings(const EvalFixture& f) { return fixture_rankings(f); }

// Random fixture over `labels` labels and `n` instances with non-empty truths.
EvalFixture random_fixture(std::size_t labels, std::size_t n, Rng& rng) {
  EvalFixture f;
  for (std::size_t c = 0; c < labels; ++c) f.label_ids.push_back(static_cast<int>(c));
  f.scores = Matrix(n, labels);
  for (double& v : f.scores.data) v = rng.next_double();
  f.truths.resize(n);
  f.instance_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.instance_ids[i] = static_cast<int>(i);
    while (f.truths[i].empty()) {
      f.truths[i].clear();
      for (std::size_t c = 0; c < labels; ++c) {
        if (rng.next_double() < 0.4) f.truths[i].push_back(static_cast<int>(c));
      }
    }
  }
  return f;
}

void check_against_oracle(const EvalFixture& f, std::size_t k) {
  std::vector<std::vector<int>> rankings = as_rankings(f);
  std::vector<std::set<int>> truth_sets;
  for (const auto& t : f.truths) truth_sets.emplace_back(t.begin(), t.end());

  CHECK(std::fabs(instance_map(f.truths, rankings) - metric_oracle::i_map(truth_sets, rankings)) <
        1e-12);

  // transpose for the oracle's label-centric view
  std::vector<std::set<int>> positives(f.label_ids.size());
  std::vector<std::vector<int>> instance_rankings(f.label_ids.size());
  for (std::size_t j = 0; j < f.label_ids.size(); ++j) {
    for (std::size_t i = 0; i < f.truths.size(); ++i) {
      if (truth_sets[i].count(f.label_ids[j]) > 0) positives[j].insert(static_cast<int>(i));
    }
    std::vector<std::size_t> order(f.scores.rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return f.scores(a, j) > f.scores(b, j);
    });
    for (std::size_t r : order) instance_rankings[j].push_back(static_cast<int>(r));
  }
  bool any_positive = false;
  for (const auto& p : positives) {
    if (!p.empty()) any_positive = true;
  }
  if (any_positive) {
    CHECK(std::fabs(label_map(f) - metric_oracle::l_map(positives, instance_rankings)) < 1e-12);
  }

  Prf mine = overall_prf(f.truths, rankings, k);
  metric_oracle::Prf theirs = metric_oracle::overall_prf(truth_sets, rankings, k);
  CHECK(std::fabs(mine.precision - theirs.precision) < 1e-12);
  CHECK(std::fabs(mine.recall - theirs.recall) < 1e-12);
  CHECK(std::fabs(mine.f1 - theirs.f1) < 1e-12);
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("precision_at_k hand cases") {
  CHECK(precision_at_k({2}, {2, 1, 3}, 1) == 1.0);
  CHECK(precision_at_k({1, 3}, {3, 2, 1}, 2) == doctest::Approx(0.5));
  CHECK(precision_at_k({1, 3}, {3, 2, 1}, 3) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(precision_at_k({1}, {1, 2}, 0), DataError);
  CHECK_THROWS_AS(precision_at_k({1}, {1, 2}, 3), DataError);
}

TEST_CASE("instance MAP hand cases") {
  CHECK(instance_map({{0}}, {{0, 1, 2}}) == doctest::Approx(1.0));
  CHECK(instance_map({{1}}, {{0, 1, 2}}) == doctest::Approx(0.5));
  CHECK(instance_map({{0, 2}}, {{0, 1, 2}}) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("label MAP hand cases") {
  EvalFixture f;
  f.label_ids = {0};
  f.scores = Matrix(4, 1);
  f.scores(0, 0) = 0.9;
  f.scores(1, 0) = 0.5;
  f.scores(2, 0) = 0.3;
  f.scores(3, 0) = 0.1;
  f.truths = {{0}, {}, {}, {}};
  f.instance_ids = {0, 1, 2, 3};
  CHECK(label_map(f) == doctest::Approx(1.0));

  f.truths = {{}, {0}, {}, {}};
  CHECK(label_map(f) == doctest::Approx(0.5));

  f.truths = {{0}, {}, {0}, {}};
  CHECK(label_map(f) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("overall precision/recall/f1 hand case") {
  // 2 instances, truth sizes 1 and 3, hits at k=5 are 1 and 2.
  std::vector<std::vector<int>> truths{{0}, {1, 2, 3}};
  std::vector<std::vector<int>> rankings{{0, 4, 5, 6, 7, 1}, {1, 4, 2, 8, 9, 0}};
  Prf prf = overall_prf(truths, rankings, 5);
  CHECK(prf.precision == doctest::Approx(0.3));
  CHECK(prf.recall == doctest::Approx(0.75));
  CHECK(prf.f1 == doctest::Approx(2.0 * 0.3 * 0.75 / 1.05));
}

TEST_CASE("recall is non-decreasing in k") {
  Rng rng(41);
  EvalFixture f = random_fixture(6, 5, rng);
  std::vector<std::vector<int>> rankings = as_rankings(f);
  double prev = 0.0;
  for (std::size_t k = 1; k <= 6; ++k) {
    double r = overall_prf(f.truths, rankings, k).recall;
    CHECK(r >= prev - 1e-15);
    prev = r;
  }
  CHECK(prev == doctest::Approx(1.0));  // full depth recalls everything
}

TEST_CASE("precision/recall count the same hits") {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    EvalFixture f = random_fixture(5, 4, rng);
    std::vector<std::vector<int>> rankings = as_rankings(f);
    std::size_t truth_total = 0;
    for (const auto& t : f.truths) truth_total += t.size();
    for (std::size_t k = 1; k <= 5; ++k) {
      Prf prf = overall_prf(f.truths, rankings, k);
      CHECK(prf.precision * static_cast<double>(k) * static_cast<double>(f.truths.size()) ==
            doctest::Approx(prf.recall * static_cast<double>(truth_total)).epsilon(1e-12));
    }
  }
}

TEST_CASE("scenario filtering restricts candidates and drops emptied instances") {
  Matrix scores(3, 4);
  for (std::size_t i = 0; i < scores.data.size(); ++i) scores.data[i] = static_cast<double>(i);
  std::vector<std::vector<int>> truths{{0, 2}, {3}, {1}};
  std::vector<int> ids{10, 11, 12};
  Scenario scenario;
  scenario.known_labels = {0, 1};
  scenario.unseen_labels = {2, 3};

  scenario.kind = ScenarioKind::kGzsl;
  EvalFixture g = apply_scenario(scores, truths, ids, scenario);
  CHECK(g.instance_ids == ids);
  CHECK(g.label_ids == std::vector<int>{0, 1, 2, 3});

  scenario.kind = ScenarioKind::kKnownOnly;
  EvalFixture k = apply_scenario(scores, truths, ids, scenario);
  CHECK(k.instance_ids == std::vector<int>{10, 12});  // the {3} instance drops out
  CHECK(k.label_ids == std::vector<int>{0, 1});
  CHECK(k.truths[0] == std::vector<int>{0});

  scenario.kind = ScenarioKind::kUnseenOnly;
  EvalFixture u = apply_scenario(scores, truths, ids, scenario);
  CHECK(u.instance_ids == std::vector<int>{10, 11});
  CHECK(u.truths[0] == std::vector<int>{2});
  CHECK(u.truths[1] == std::vector<int>{3});
}

TEST_CASE("metrics equal the brute-force oracle on exhaustive single-instance fixtures") {
  // every ranking (permutation) x every non-empty truth subset, up to 5 labels
  for (std::size_t labels = 1; labels <= 5; ++labels) {
    std::vector<int> perm(labels);
    for (std::size_t c = 0; c < labels; ++c) perm[c] = static_cast<int>(c);
    std::vector<int> ranking = perm;
    do {
      for (unsigned mask = 1; mask < (1u << labels); ++mask) {
        std::vector<int> truth;
        for (std::size_t c = 0; c < labels; ++c) {
          if (mask & (1u << c)) truth.push_back(static_cast<int>(c));
        }
        std::set<int> truth_set(truth.begin(), truth.end());
        CHECK(std::fabs(instance_map({truth}, {ranking}) -
                        metric_oracle::i_map({truth_set}, {ranking})) < 1e-12);
        for (std::size_t k = 1; k <= labels; ++k) {
          CHECK(std::fabs(precision_at_k(truth, ranking, k) -
                          metric_oracle::p_at_k(truth_set, ranking, k)) < 1e-12);
        }
      }
    } while (std::next_permutation(ranking.begin(), ranking.end()));
  }
}

TEST_CASE("metrics equal the brute-force oracle on random multi-instance fixtures") {
  Rng rng(43);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t labels = 2 + rng.uniform_index(4);  // up to 5
    const std::size_t n = 1 + rng.uniform_index(4);       // up to 4
    EvalFixture f = random_fixture(labels, n, rng);
    check_against_oracle(f, 1 + rng.uniform_index(labels));
  }
}

TEST_CASE("perfect rankings give MAP 1 in both views") {
  EvalFixture f;
  f.label_ids = {0, 1, 2};
  f.instance_ids = {0, 1};
  f.truths = {{0}, {1, 2}};
  f.scores = Matrix(2, 3);
  f.scores(0, 0) = 1.0;
  f.scores(0, 1) = 0.1;
  f.scores(0, 2) = 0.0;
  f.scores(1, 0) = 0.0;
  f.scores(1, 1) = 1.0;
  f.scores(1, 2) = 0.9;
  CHECK(instance_map(f.truths, as_rankings(f)) == doctest::Approx(1.0));
  CHECK(label_map(f) == doctest::Approx(1.0));
}

TEST_CASE("rgs matches the analytic expectation on the 3-label fixture") {
  // One relevant label among three: E[AP] = (1 + 1/2 + 1/3)/3 = 11/18.
  std::vector<std::vector<int>> truths{{0}, {1}, {2}};
  std::vector<int> ids{0, 1, 2};
  Scenario scenario;
  scenario.kind = ScenarioKind::kGzsl;
  scenario.known_labels = {0, 1, 2};
  Rng rng(91);
  RgsResult res = rgs_baseline(truths, ids, 3, scenario, 1, 10000, rng);
  CHECK(std::fabs(res.i_map.mean - 11.0 / 18.0) < 0.01);
  CHECK(res.i_map.sem > 0.0);
  CHECK(res.i_map.sem_valid);
}

TEST_CASE("rgs is deterministic per seed and flags single-trial sems") {
  std::vector<std::vector<int>> truths{{0, 1}, {2}};
  std::vector<int> ids{0, 1};
  Scenario scenario;
  scenario.kind = ScenarioKind::kGzsl;
  scenario.known_labels = {0, 1, 2, 3};
  Rng a(13), b(13);
  RgsResult ra = rgs_baseline(truths, ids, 4, scenario, 2, 50, a);
  RgsResult rb = rgs_baseline(truths, ids, 4, scenario, 2, 50, b);
  CHECK(ra.i_map.mean == rb.i_map.mean);
  CHECK(ra.f1.sem == rb.f1.sem);

  Rng c(14);
  RgsResult one = rgs_baseline(truths, ids, 4, scenario, 2, 1, c);
  CHECK(one.i_map.sem == 0.0);
  CHECK_FALSE(one.i_map.sem_valid);
}

TEST_CASE("report lines come out in a stable field order") {
  EvalReport rep;
  rep.scenario = "gzsl";
  rep.k = 5;
  rep.instance_count = 7;
  rep.label_count = 4;
  rep.i_map = 0.25;
  std::ostringstream os;
  write_report(os, rep);
  const std::string text = os.str();
  CHECK(text.find("MLZSR-REPORT v1") == 0);
  CHECK(text.find("scenario=gzsl metric=i_map k=5 value=0.25") != std::string::npos);
  CHECK(text.find("metric=f1") != std::string::npos);
}

TEST_SUITE_END();
