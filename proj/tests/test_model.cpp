#include <cmath>

#include "doctest.h"
#include "mlzsr/errors.hpp"
#include "mlzsr/model.hpp"
#include "mlzsr/rng.hpp"
#include "mlzsr/verify.hpp"

using namespace mlzsr;

namespace {

LstmLayer zero_lstm(std::size_t d_x, std::size_t n1) {
  Rng rng(0);
  VisualModel holder = init_visual_model({d_x, n1, 1, 1}, 0.0, rng);
  LstmLayer layer = holder.lstm;
  for (Matrix* p : layer.params()) p->fill(0.0);
  return layer;
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("all-zero lstm stays at the zero fixed point") {
  LstmLayer layer = zero_lstm(3, 4);
  std::vector<std::vector<double>> inputs(5, std::vector<double>{0.4, -1.0, 2.5});
  auto h = lstm_forward(layer, inputs, nullptr);
  for (const auto& step : h) {
    for (double v : step) CHECK(v == 0.0);
  }
}

TEST_CASE("saturated gates with zero candidate keep the cell near zero") {
  // b_i = b_o = +10 opens input/output gates, b_f = -10 closes the forget
  // gate, zero candidate weights: c_1 = sigm(10) * tanh(0) = 0, h_1 = 0.
  LstmLayer layer = zero_lstm(1, 1);
  layer.b_i(0, 0) = 10.0;
  layer.b_o(0, 0) = 10.0;
  layer.b_f(0, 0) = -10.0;
  auto h = lstm_forward(layer, {{3.7}}, nullptr);
  CHECK(std::fabs(h[0][0]) < 1e-12);
}

TEST_CASE("lstm gradients match finite differences on random instances") {
  GradCheckOptions opts;
  opts.seed = 101;
  opts.cases_per_component = 8;
  for (const GradCheckResult& r : run_gradient_checks(opts)) {
    if (r.component == "lstm_layer") {
      CHECK(r.max_rel_err <= 1e-4);
    }
  }
}

TEST_CASE("all-zero visual model embeds everything to zero") {
  Rng rng(4);
  VisualModel model = init_visual_model({3, 4, 4, 2}, 0.0, rng);
  for (Matrix* p : model.params()) p->fill(0.0);
  Matrix segments(5, 3);
  for (double& v : segments.data) v = rng.next_normal();
  Rng unused(0);
  VisualEmbedding emb = visual_embed(model, segments, false, unused);
  for (double v : emb.embeddings.data) CHECK(v == 0.0);
}

TEST_CASE("inference is a pure function of model and input") {
  Rng rng(5);
  VisualModel model = init_visual_model({4, 5, 5, 3}, 0.5, rng);
  Matrix segments(6, 4);
  for (double& v : segments.data) v = rng.next_normal();
  Rng r1(123), r2(456);  // different rngs must not matter at inference
  VisualEmbedding a = visual_embed(model, segments, false, r1);
  VisualEmbedding b = visual_embed(model, segments, false, r2);
  CHECK(a.embeddings.data == b.embeddings.data);
}

TEST_CASE("training-mode dropout masks differ between draws but scale correctly") {
  Rng rng(6);
  VisualModel model = init_visual_model({3, 8, 4, 2}, 0.5, rng);
  Matrix segments(4, 3);
  for (double& v : segments.data) v = rng.next_normal();
  Rng d1(7), d2(8);
  VisualEmbedding a = visual_embed(model, segments, true, d1);
  VisualEmbedding b = visual_embed(model, segments, true, d2);
  CHECK(a.embeddings.data != b.embeddings.data);
  for (const auto& step : a.cache.drop_scale) {
    for (double s : step) CHECK((s == 0.0 || s == doctest::Approx(2.0)));
  }
}

TEST_CASE("zero semantic model returns zeros; dead ReLU region returns the bias") {
  Rng rng(8);
  SemanticModel model = init_semantic_model({3, 4, 2}, rng);
  for (Matrix* p : model.params()) p->fill(0.0);
  std::vector<double> s{0.1, -0.2, 0.4};
  for (double v : semantic_embed(model, s)) CHECK(v == 0.0);

  // Forcing every hidden pre-activation negative leaves only the bias path.
  SemanticModel dead = init_semantic_model({3, 4, 2}, rng);
  dead.hidden.b.fill(-100.0);
  dead.embed.b(0, 0) = 1.5;
  dead.embed.b(1, 0) = -0.5;
  std::vector<double> out = semantic_embed(dead, s);
  CHECK(out[0] == 1.5);
  CHECK(out[1] == -0.5);
}

TEST_CASE("init is deterministic per seed and bounded by the fan limit") {
  Rng a(77), b(77);
  VisualModel ma = init_visual_model({4, 5, 6, 3}, 0.0, a);
  VisualModel mb = init_visual_model({4, 5, 6, 3}, 0.0, b);
  auto pa = ma.params();
  auto pb = mb.params();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->data == pb[i]->data);

  for (const Matrix* w : {&ma.lstm.w_xi, &ma.dense.w, &ma.embed.w}) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w->rows + w->cols));
    for (double v : w->data) CHECK(std::fabs(v) <= limit);
  }
  // biases zero except the forget gate
  for (double v : ma.lstm.b_i.data) CHECK(v == 0.0);
  for (double v : ma.lstm.b_f.data) CHECK(v == 1.0);
}

TEST_CASE("different seeds give different parameters") {
  int differing = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng a(seed), b(seed + 1);
    VisualModel ma = init_visual_model({3, 3, 3, 2}, 0.0, a);
    VisualModel mb = init_visual_model({3, 3, 3, 2}, 0.0, b);
    if (ma.lstm.w_xi.data != mb.lstm.w_xi.data) ++differing;
  }
  CHECK(differing == 10);
}

TEST_CASE("init rejects zero dimensions") {
  Rng rng(1);
  CHECK_THROWS_AS(init_visual_model({0, 3, 3, 2}, 0.0, rng), ConfigError);
  CHECK_THROWS_AS(init_semantic_model({3, 0, 2}, rng), ConfigError);
}

TEST_CASE("backward rejects a cache from a different input shape") {
  Rng rng(12);
  VisualModel model = init_visual_model({3, 4, 4, 2}, 0.0, rng);
  Matrix segments(5, 3);
  Rng unused(0);
  VisualEmbedding emb = visual_embed(model, segments, false, unused);
  CHECK_THROWS_AS(visual_backward(model, emb, Matrix(4, 2)), ShapeError);
}

TEST_CASE("backward rejects caches from mismatched models") {
  Rng rng(13);
  SemanticModel narrow = init_semantic_model({3, 4, 2}, rng);
  SemanticModel wide = init_semantic_model({3, 6, 2}, rng);
  SemanticCache cache;
  semantic_embed(narrow, std::vector<double>{0.1, 0.2, 0.3}, &cache);
  CHECK_THROWS_AS(semantic_backward(wide, cache, std::vector<double>{1.0, -1.0}), StateError);

  VisualModel va = init_visual_model({3, 4, 4, 2}, 0.0, rng);
  Matrix segments(5, 3);
  Rng unused(0);
  VisualEmbedding emb = visual_embed(va, segments, false, unused);
  VisualEmbedding stale = emb;
  stale.cache.dense_act.pop_back();
  CHECK_THROWS_AS(visual_backward(va, stale, Matrix(5, 2)), StateError);
}

TEST_CASE("model and loss gradients pass the full verification sweep") {
  GradCheckOptions opts;
  opts.seed = 2024;
  opts.cases_per_component = 6;
  for (const GradCheckResult& r : run_gradient_checks(opts)) {
    INFO(r.component, " max rel err ", r.max_rel_err);
    CHECK(r.pass);
  }
}

TEST_SUITE_END();
