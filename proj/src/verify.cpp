#include "mlzsr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mlzsr/gradcheck.hpp"
#include "mlzsr/loss.hpp"
#include "mlzsr/model.hpp"
#include "mlzsr/rng.hpp"
#include "mlzsr/scoring.hpp"

namespace mlzsr {
namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.next_normal() * scale;
  return m;
}

double probe_sum(const Matrix& probe, const Matrix& values) {
  double s = 0.0;
  for (std::size_t i = 0; i < probe.data.size(); ++i) s += probe.data[i] * values.data[i];
  return s;
}

// Freshly initialized biases are exactly zero, which can park ReLU
// pre-activations on their kink (dropout makes this likely); jitter every
// parameter so the check runs at a generic point.
template <typename ModelT>
void jitter_params(ModelT& model, Rng& rng) {
  for (Matrix* p : model.params()) {
    for (double& v : p->data) v += 0.05 * rng.next_normal();
  }
}

struct Component {
  std::string name;
  double tolerance;
  // Runs one case and returns the max relative error between the analytic and
  // finite-difference gradients.
  std::function<double(Rng&, double)> run;
};

double check_lstm(Rng& rng, double h) {
  const std::size_t d_x = 1 + rng.uniform_index(6);
  const std::size_t n1 = 1 + rng.uniform_index(6);
  const std::size_t steps = 1 + rng.uniform_index(4);
  Rng init = rng.split(11);
  VisualModel holder = init_visual_model({d_x, n1, 1, 1}, 0.0, init);
  LstmLayer layer = holder.lstm;
  jitter_params(layer, init);

  std::vector<std::vector<double>> inputs(steps, std::vector<double>(d_x));
  for (auto& x : inputs) {
    for (double& v : x) v = rng.next_normal();
  }
  Matrix probe = random_matrix(steps, n1, rng);
  std::vector<std::vector<double>> upstream(steps, std::vector<double>(n1));
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t k = 0; k < n1; ++k) upstream[t][k] = probe(t, k);
  }

  LstmCache cache;
  lstm_forward(layer, inputs, &cache);
  std::vector<Matrix> grads = zero_grads_like(layer.params());
  lstm_backward(layer, cache, upstream, grads, 0);
  std::vector<const Matrix*> grad_ptrs;
  for (const Matrix& g : grads) grad_ptrs.push_back(&g);
  std::vector<double> analytic = flatten_params(grad_ptrs);

  std::vector<double> theta = flatten_params(layer.params());
  auto f = [&](std::span<const double> t) {
    LstmLayer probe_layer = layer;
    unflatten_params(std::vector<double>(t.begin(), t.end()), probe_layer.params());
    std::vector<std::vector<double>> h_seq = lstm_forward(probe_layer, inputs, nullptr);
    double s = 0.0;
    for (std::size_t step = 0; step < steps; ++step) {
      for (std::size_t k = 0; k < n1; ++k) s += probe(step, k) * h_seq[step][k];
    }
    return s;
  };
  std::vector<double> numeric = finite_diff_grad(f, theta, h);
  return gradient_rel_error(analytic, numeric);
}

double check_visual(Rng& rng, double h, VisualFront front, bool dropout) {
  const std::size_t d_x = 1 + rng.uniform_index(5);
  const std::size_t n1 = 1 + rng.uniform_index(5);
  const std::size_t n2 = 1 + rng.uniform_index(5);
  const std::size_t d_e = 1 + rng.uniform_index(5);
  const std::size_t steps = 1 + rng.uniform_index(4);
  Rng init = rng.split(12);
  VisualModel model = init_visual_model({d_x, n1, n2, d_e}, dropout ? 0.4 : 0.0, init, front);
  jitter_params(model, init);

  Matrix segments = random_matrix(steps, d_x, rng);
  Matrix probe = random_matrix(steps, d_e, rng);
  const std::uint64_t mask_seed = rng.next_u64();

  Rng mask_rng(mask_seed);
  VisualEmbedding emb = visual_embed(model, segments, dropout, mask_rng);
  std::vector<Matrix> grads = visual_backward(model, emb, probe);
  std::vector<const Matrix*> grad_ptrs;
  for (const Matrix& g : grads) grad_ptrs.push_back(&g);
  std::vector<double> analytic = flatten_params(grad_ptrs);

  std::vector<double> theta = flatten_params(model.params());
  auto f = [&](std::span<const double> t) {
    VisualModel probe_model = model;
    unflatten_params(std::vector<double>(t.begin(), t.end()), probe_model.params());
    // Reseeding reproduces the identical dropout masks per evaluation.
    Rng eval_rng(mask_seed);
    VisualEmbedding e = visual_embed(probe_model, segments, dropout, eval_rng);
    return probe_sum(probe, e.embeddings);
  };
  std::vector<double> numeric = finite_diff_grad(f, theta, h);
  return gradient_rel_error(analytic, numeric);
}

double check_semantic(Rng& rng, double h) {
  const std::size_t d_s = 1 + rng.uniform_index(6);
  const std::size_t n1s = 1 + rng.uniform_index(6);
  const std::size_t d_e = 1 + rng.uniform_index(6);
  Rng init = rng.split(13);
  SemanticModel model = init_semantic_model({d_s, n1s, d_e}, init);
  jitter_params(model, init);

  std::vector<double> input(d_s);
  for (double& v : input) v = rng.next_normal();
  std::vector<double> probe(d_e);
  for (double& v : probe) v = rng.next_normal();

  SemanticCache cache;
  std::vector<double> out = semantic_embed(model, input, &cache);
  (void)out;
  std::vector<Matrix> grads = semantic_backward(model, cache, probe);
  std::vector<const Matrix*> grad_ptrs;
  for (const Matrix& g : grads) grad_ptrs.push_back(&g);
  std::vector<double> analytic = flatten_params(grad_ptrs);

  std::vector<double> theta = flatten_params(model.params());
  auto f = [&](std::span<const double> t) {
    SemanticModel probe_model = model;
    unflatten_params(std::vector<double>(t.begin(), t.end()), probe_model.params());
    std::vector<double> e = semantic_embed(probe_model, input);
    double s = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) s += probe[k] * e[k];
    return s;
  };
  std::vector<double> numeric = finite_diff_grad(f, theta, h);
  return gradient_rel_error(analytic, numeric);
}

// Scores/targets for a loss case; hinge cases resample until every pair and
// entry sits away from the margin kink.
void random_loss_case(Rng& rng, bool hinge, double margin, std::vector<double>& scores,
                      std::vector<int>& targets) {
  const std::size_t n = 2 + rng.uniform_index(5);
  scores.resize(n);
  targets.resize(n);
  for (int attempt = 0; attempt < 200; ++attempt) {
    for (std::size_t j = 0; j < n; ++j) {
      scores[j] = 4.0 * rng.next_double() - 2.0;
      targets[j] = rng.next_double() < 0.5 ? 1 : -1;
    }
    if (!hinge) return;
    bool clear = true;
    for (std::size_t p = 0; p < n && clear; ++p) {
      if (targets[p] != 1) continue;
      for (std::size_t q = 0; q < n && clear; ++q) {
        if (targets[q] != -1) continue;
        if (std::fabs(margin - scores[p] + scores[q]) < 1e-3) clear = false;
      }
    }
    for (std::size_t j = 0; j < n && clear; ++j) {
      if (std::fabs(margin - targets[j] * scores[j]) < 1e-3) clear = false;
    }
    if (clear) return;
  }
}

double check_loss(Rng& rng, double h, bool hinge, bool semantic) {
  const double margin = 1.0;
  std::vector<double> scores;
  std::vector<int> targets;
  random_loss_case(rng, hinge, margin, scores, targets);

  LossResult res;
  if (hinge) {
    res = semantic ? hinge_semantic_loss(scores, targets, margin)
                   : hinge_visual_loss(scores, targets, margin);
  } else {
    res = semantic ? ranknet_semantic_loss(scores, targets) : ranknet_visual_loss(scores, targets);
  }
  auto f = [&](std::span<const double> o) {
    std::vector<double> s(o.begin(), o.end());
    if (hinge) {
      return (semantic ? hinge_semantic_loss(s, targets, margin)
                       : hinge_visual_loss(s, targets, margin))
          .loss;
    }
    return (semantic ? ranknet_semantic_loss(s, targets) : ranknet_visual_loss(s, targets)).loss;
  };
  std::vector<double> numeric = finite_diff_grad(f, scores, h);
  return gradient_rel_error(res.grad, numeric);
}

// Whole visual training path: model -> segment scores -> average pooling ->
// rank loss, gradients with respect to the model parameters.
double check_pipeline(Rng& rng, double h, bool hinge) {
  const std::size_t d_x = 1 + rng.uniform_index(4);
  const std::size_t n1 = 1 + rng.uniform_index(4);
  const std::size_t n2 = 1 + rng.uniform_index(4);
  const std::size_t d_e = 1 + rng.uniform_index(4);
  const std::size_t steps = 1 + rng.uniform_index(4);
  const std::size_t labels = 2 + rng.uniform_index(4);
  const double margin = 1.0;
  Rng init = rng.split(14);
  VisualModel model = init_visual_model({d_x, n1, n2, d_e}, 0.0, init);
  jitter_params(model, init);

  Matrix segments = random_matrix(steps, d_x, rng);
  Matrix sem = random_matrix(d_e, labels, rng);
  std::vector<int> targets(labels);
  for (int& y : targets) y = rng.next_double() < 0.5 ? 1 : -1;

  auto objective = [&](const VisualModel& m) {
    Rng unused(0);
    VisualEmbedding e = visual_embed(m, segments, false, unused);
    std::vector<double> pooled = pool_average(segment_scores(e.embeddings, sem));
    return hinge ? hinge_visual_loss(pooled, targets, margin).loss
                 : ranknet_visual_loss(pooled, targets).loss;
  };

  Rng unused(0);
  VisualEmbedding emb = visual_embed(model, segments, false, unused);
  std::vector<double> pooled = pool_average(segment_scores(emb.embeddings, sem));
  LossResult res = hinge ? hinge_visual_loss(pooled, targets, margin)
                         : ranknet_visual_loss(pooled, targets);
  std::vector<double> row(d_e, 0.0);
  matvec(sem, res.grad, row, false);
  Matrix upstream(steps, d_e);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t j = 0; j < d_e; ++j) upstream(t, j) = row[j] / static_cast<double>(steps);
  }
  std::vector<Matrix> grads = visual_backward(model, emb, upstream);
  std::vector<const Matrix*> grad_ptrs;
  for (const Matrix& g : grads) grad_ptrs.push_back(&g);
  std::vector<double> analytic = flatten_params(grad_ptrs);

  std::vector<double> theta = flatten_params(model.params());
  auto f = [&](std::span<const double> t) {
    VisualModel probe_model = model;
    unflatten_params(std::vector<double>(t.begin(), t.end()), probe_model.params());
    return objective(probe_model);
  };
  std::vector<double> numeric = finite_diff_grad(f, theta, h);
  return gradient_rel_error(analytic, numeric);
}

// Whole semantic training path: semantic model -> scores against frozen mean
// visual embeddings -> rank loss, gradients with respect to the model.
double check_semantic_pipeline(Rng& rng, double h, bool hinge) {
  const std::size_t d_s = 1 + rng.uniform_index(4);
  const std::size_t n1s = 1 + rng.uniform_index(4);
  const std::size_t d_e = 1 + rng.uniform_index(4);
  const std::size_t instances = 2 + rng.uniform_index(4);
  const double margin = 1.0;
  Rng init = rng.split(15);
  SemanticModel model = init_semantic_model({d_s, n1s, d_e}, init);
  jitter_params(model, init);

  std::vector<double> input(d_s);
  for (double& v : input) v = rng.next_normal();
  Matrix mean_visual = random_matrix(instances, d_e, rng);
  std::vector<int> targets(instances);
  for (int& y : targets) y = rng.next_double() < 0.5 ? 1 : -1;

  auto objective = [&](const SemanticModel& m) {
    std::vector<double> e_c = semantic_embed(m, input);
    std::vector<double> scores(instances, 0.0);
    matvec(mean_visual, e_c, scores, false);
    return hinge ? hinge_semantic_loss(scores, targets, margin).loss
                 : ranknet_semantic_loss(scores, targets).loss;
  };

  SemanticCache cache;
  std::vector<double> e_c = semantic_embed(model, input, &cache);
  std::vector<double> scores(instances, 0.0);
  matvec(mean_visual, e_c, scores, false);
  LossResult res = hinge ? hinge_semantic_loss(scores, targets, margin)
                         : ranknet_semantic_loss(scores, targets);
  std::vector<double> upstream(d_e, 0.0);
  matvec_transposed(mean_visual, res.grad, upstream);
  std::vector<Matrix> grads = semantic_backward(model, cache, upstream);
  std::vector<const Matrix*> grad_ptrs;
  for (const Matrix& g : grads) grad_ptrs.push_back(&g);
  std::vector<double> analytic = flatten_params(grad_ptrs);

  std::vector<double> theta = flatten_params(model.params());
  auto f = [&](std::span<const double> t) {
    SemanticModel probe_model = model;
    unflatten_params(std::vector<double>(t.begin(), t.end()), probe_model.params());
    return objective(probe_model);
  };
  std::vector<double> numeric = finite_diff_grad(f, theta, h);
  return gradient_rel_error(analytic, numeric);
}

}  // namespace

void unflatten_params(const std::vector<double>& theta, const std::vector<Matrix*>& params) {
  std::size_t offset = 0;
  for (Matrix* p : params) {
    std::copy(theta.begin() + static_cast<std::ptrdiff_t>(offset),
              theta.begin() + static_cast<std::ptrdiff_t>(offset + p->data.size()),
              p->data.begin());
    offset += p->data.size();
  }
}

std::vector<GradCheckResult> run_gradient_checks(const GradCheckOptions& opts) {
  const double mt = opts.model_tolerance;
  const double lt = opts.loss_tolerance;
  std::vector<Component> components = {
      {"lstm_layer", mt, [](Rng& r, double h) { return check_lstm(r, h); }},
      {"dense_embed_layers", mt, [](Rng& r, double h) { return check_semantic(r, h); }},
      {"visual_model", mt,
       [](Rng& r, double h) { return check_visual(r, h, VisualFront::kRecurrent, false); }},
      {"visual_model_dropout", mt,
       [](Rng& r, double h) { return check_visual(r, h, VisualFront::kRecurrent, true); }},
      {"visual_model_nrc", mt,
       [](Rng& r, double h) { return check_visual(r, h, VisualFront::kDense, false); }},
      {"semantic_model", mt, [](Rng& r, double h) { return check_semantic(r, h); }},
      {"ranknet_visual_loss", lt, [](Rng& r, double h) { return check_loss(r, h, false, false); }},
      {"ranknet_semantic_loss", lt, [](Rng& r, double h) { return check_loss(r, h, false, true); }},
      {"hinge_visual_loss", lt, [](Rng& r, double h) { return check_loss(r, h, true, false); }},
      {"hinge_semantic_loss", lt, [](Rng& r, double h) { return check_loss(r, h, true, true); }},
      {"visual_pipeline_ranknet", mt, [](Rng& r, double h) { return check_pipeline(r, h, false); }},
      {"visual_pipeline_hinge", mt, [](Rng& r, double h) { return check_pipeline(r, h, true); }},
      {"semantic_pipeline_ranknet", mt,
       [](Rng& r, double h) { return check_semantic_pipeline(r, h, false); }},
      {"semantic_pipeline_hinge", mt,
       [](Rng& r, double h) { return check_semantic_pipeline(r, h, true); }},
  };

  std::vector<GradCheckResult> results;
  Rng root(opts.seed);
  for (std::size_t ci = 0; ci < components.size(); ++ci) {
    GradCheckResult res;
    res.component = components[ci].name;
    res.tolerance = components[ci].tolerance;
    res.cases = opts.cases_per_component;
    Rng comp_rng = root.split(ci + 1);
    for (std::size_t k = 0; k < opts.cases_per_component; ++k) {
      Rng case_rng = comp_rng.split(k);
      res.max_rel_err = std::max(res.max_rel_err, components[ci].run(case_rng, opts.step));
    }
    res.pass = res.max_rel_err <= res.tolerance;
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace mlzsr
