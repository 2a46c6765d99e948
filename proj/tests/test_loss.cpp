#include <cmath>

#include "doctest.h"
#include "mlzsr/errors.hpp"
#include "mlzsr/gradcheck.hpp"
#include "mlzsr/loss.hpp"
#include "mlzsr/rng.hpp"

using namespace mlzsr;

namespace {

constexpr double kLn2 = 0.6931471805599453;

std::pair<std::vector<double>, std::vector<int>> random_case(Rng& rng, std::size_t n) {
  std::vector<double> scores(n);
  std::vector<int> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = 4.0 * rng.next_double() - 2.0;
    targets[i] = rng.next_double() < 0.5 ? 1 : -1;
  }
  return {scores, targets};
}

}  // namespace

TEST_SUITE_BEGIN("loss");

TEST_CASE("ranknet: one positive one negative at zero scores gives ln 2") {
  LossResult res = ranknet_visual_loss(std::vector<double>{0.0, 0.0}, std::vector<int>{1, -1});
  CHECK(res.loss == doctest::Approx(kLn2).epsilon(1e-12));
  LossResult sem = ranknet_semantic_loss(std::vector<double>{0.0, 0.0}, std::vector<int>{1, -1});
  CHECK(sem.loss == doctest::Approx(kLn2).epsilon(1e-12));
}

TEST_CASE("ranknet: all-positive targets reduce to the regularizer with weight 1/n") {
  std::vector<double> scores{0.3, -1.4, 2.0};
  std::vector<int> targets{1, 1, 1};
  LossResult res = ranknet_visual_loss(scores, targets);
  double expected = 0.0;
  for (double o : scores) expected += softplus(-o);
  expected /= 3.0;
  CHECK(res.loss == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ranknet: empty positive set leaves the regularizer-only loss") {
  std::vector<double> scores{0.5, -0.5};
  std::vector<int> targets{-1, -1};
  LossResult res = ranknet_semantic_loss(scores, targets);
  double expected = (softplus(0.5) + softplus(-0.5)) / 2.0;
  CHECK(res.loss == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("hinge: all-zero scores at margin 1 give loss 1") {
  LossResult res = hinge_visual_loss(std::vector<double>{0.0, 0.0}, std::vector<int>{1, -1}, 1.0);
  CHECK(res.loss == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hinge: met margins give exactly zero loss") {
  std::vector<double> scores{2.0, 1.5, -1.2, -3.0};
  std::vector<int> targets{1, 1, -1, -1};
  LossResult res = hinge_visual_loss(scores, targets, 1.0);
  CHECK(res.loss == 0.0);
  for (double g : res.grad) CHECK(g == 0.0);
  LossResult sem = hinge_semantic_loss(scores, targets, 1.0);
  CHECK(sem.loss == 0.0);
}

TEST_CASE("losses reject malformed inputs") {
  std::vector<double> scores{0.0, 1.0};
  CHECK_THROWS_AS(ranknet_visual_loss(scores, std::vector<int>{1}), ShapeError);
  CHECK_THROWS_AS(ranknet_visual_loss(scores, std::vector<int>{1, 0}), DataError);
  CHECK_THROWS_AS(hinge_visual_loss(scores, std::vector<int>{1, -1}, 0.0), ConfigError);
  CHECK_THROWS_AS(hinge_visual_loss(scores, std::vector<int>{1, -1}, -1.0), ConfigError);
}

TEST_CASE("losses are non-negative and ranknet strictly positive") {
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    auto [scores, targets] = random_case(rng, 2 + rng.uniform_index(6));
    CHECK(ranknet_visual_loss(scores, targets).loss > 0.0);
    CHECK(hinge_visual_loss(scores, targets, 1.0).loss >= 0.0);
    CHECK(ranknet_semantic_loss(scores, targets).loss > 0.0);
    CHECK(hinge_semantic_loss(scores, targets, 0.1).loss >= 0.0);
  }
}

TEST_CASE("shifting all scores by a constant moves only the regularizer") {
  Rng rng(22);
  for (int rep = 0; rep < 20; ++rep) {
    auto [scores, targets] = random_case(rng, 4);
    targets = {1, 1, -1, -1};
    const double shift = 3.0 * rng.next_double() - 1.5;
    std::vector<double> shifted = scores;
    for (double& v : shifted) v += shift;

    // Pair terms depend on score differences only, so the change in the total
    // loss must equal the change in the regularizer alone.
    auto reg_only = [&](const std::vector<double>& o) {
      double s = 0.0;
      for (std::size_t j = 0; j < o.size(); ++j) s += softplus(-targets[j] * o[j]);
      return s / (2.0 * 2.0 + 4.0);
    };
    const double base = ranknet_visual_loss(scores, targets).loss;
    const double moved = ranknet_visual_loss(shifted, targets).loss;
    CHECK(moved - base ==
          doctest::Approx(reg_only(shifted) - reg_only(scores)).epsilon(1e-10));
  }
}

TEST_CASE("duplicating an instance and averaging matches the single-instance loss") {
  Rng rng(23);
  auto [scores, targets] = random_case(rng, 5);
  const double single = ranknet_visual_loss(scores, targets).loss;
  double batch = 0.0;
  for (int i = 0; i < 8; ++i) batch += ranknet_visual_loss(scores, targets).loss;
  CHECK(batch / 8.0 == doctest::Approx(single).epsilon(1e-15));
}

TEST_CASE("gradients match finite differences") {
  Rng rng(24);
  for (int rep = 0; rep < 30; ++rep) {
    auto [scores, targets] = random_case(rng, 2 + rng.uniform_index(5));
    {
      LossResult res = ranknet_visual_loss(scores, targets);
      auto f = [&](std::span<const double> o) {
        return ranknet_visual_loss(std::vector<double>(o.begin(), o.end()), targets).loss;
      };
      std::vector<double> num = finite_diff_grad(f, scores, 1e-5);
      CHECK(gradient_rel_error(res.grad, num) < 1e-6);
    }
    {
      LossResult res = ranknet_semantic_loss(scores, targets, RegularizerForm::kLiteral);
      auto f = [&](std::span<const double> o) {
        return ranknet_semantic_loss(std::vector<double>(o.begin(), o.end()), targets,
                                     RegularizerForm::kLiteral)
            .loss;
      };
      std::vector<double> num = finite_diff_grad(f, scores, 1e-5);
      CHECK(gradient_rel_error(res.grad, num) < 1e-6);
    }
  }
}

TEST_CASE("literal regularizer form exceeds the softplus form") {
  // 1 + exp(z) > log(1 + exp(z)) pointwise, so the literal reading always
  // produces the larger loss on identical inputs.
  Rng rng(25);
  auto [scores, targets] = random_case(rng, 4);
  const double soft = ranknet_semantic_loss(scores, targets, RegularizerForm::kSoftplus).loss;
  const double literal = ranknet_semantic_loss(scores, targets, RegularizerForm::kLiteral).loss;
  CHECK(literal > soft);
}

TEST_CASE("softplus is overflow-safe") {
  CHECK(softplus(1000.0) == doctest::Approx(1000.0));
  CHECK(softplus(-1000.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(softplus(750.0)));
  CHECK(softplus(0.0) == doctest::Approx(kLn2).epsilon(1e-12));
}

TEST_SUITE_END();
