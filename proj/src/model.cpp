#include "mlzsr/model.hpp"

#include <cmath>
#include <string>

#include "mlzsr/errors.hpp"

namespace mlzsr {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void init_fan_uniform(Matrix& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
  for (double& v : w.data) v = (2.0 * rng.next_double() - 1.0) * limit;
}

Matrix bias(std::size_t n) { return Matrix(n, 1); }

// ReLU linear layer helpers shared by both models.
std::vector<double> linear_forward(const Linear& layer, std::span<const double> x) {
  std::vector<double> out(layer.w.rows, 0.0);
  matvec(layer.w, x, out, false);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += layer.b.data[i];
  return out;
}

}  // namespace

std::vector<Matrix*> LstmLayer::params() {
  return {&w_xi, &w_hi, &w_xf, &w_hf, &w_xc, &w_hc, &w_xo, &w_ho, &b_i, &b_f, &b_c, &b_o};
}

std::vector<const Matrix*> LstmLayer::params() const {
  return {&w_xi, &w_hi, &w_xf, &w_hf, &w_xc, &w_hc, &w_xo, &w_ho, &b_i, &b_f, &b_c, &b_o};
}

std::vector<std::vector<double>> lstm_forward(const LstmLayer& layer,
                                              const std::vector<std::vector<double>>& inputs,
                                              LstmCache* cache) {
  const std::size_t n = layer.hidden_dim;
  std::vector<std::vector<double>> outputs;
  outputs.reserve(inputs.size());

  if (cache) {
    cache->steps = inputs.size();
    cache->x = inputs;
    cache->h.assign(inputs.size() + 1, std::vector<double>(n, 0.0));
    cache->c.assign(inputs.size() + 1, std::vector<double>(n, 0.0));
    cache->gate_i.assign(inputs.size(), std::vector<double>(n, 0.0));
    cache->gate_f.assign(inputs.size(), std::vector<double>(n, 0.0));
    cache->gate_g.assign(inputs.size(), std::vector<double>(n, 0.0));
    cache->gate_o.assign(inputs.size(), std::vector<double>(n, 0.0));
    cache->tanh_c.assign(inputs.size(), std::vector<double>(n, 0.0));
  }

  std::vector<double> h_prev(n, 0.0), c_prev(n, 0.0);
  std::vector<double> ai(n), af(n), ag(n), ao(n);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const std::vector<double>& x = inputs[t];
    if (x.size() != layer.input_dim) {
      throw ShapeError("lstm_forward: input dim " + std::to_string(x.size()) + " expected " +
                       std::to_string(layer.input_dim));
    }
    for (std::size_t k = 0; k < n; ++k) {
      ai[k] = layer.b_i.data[k];
      af[k] = layer.b_f.data[k];
      ag[k] = layer.b_c.data[k];
      ao[k] = layer.b_o.data[k];
    }
    matvec(layer.w_xi, x, ai, true);
    matvec(layer.w_hi, h_prev, ai, true);
    matvec(layer.w_xf, x, af, true);
    matvec(layer.w_hf, h_prev, af, true);
    matvec(layer.w_xc, x, ag, true);
    matvec(layer.w_hc, h_prev, ag, true);
    matvec(layer.w_xo, x, ao, true);
    matvec(layer.w_ho, h_prev, ao, true);

    std::vector<double> h(n), c(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double i_g = sigmoid(ai[k]);
      const double f_g = sigmoid(af[k]);
      const double g_g = std::tanh(ag[k]);
      const double o_g = sigmoid(ao[k]);
      c[k] = f_g * c_prev[k] + i_g * g_g;
      const double tc = std::tanh(c[k]);
      h[k] = o_g * tc;
      if (cache) {
        cache->gate_i[t][k] = i_g;
        cache->gate_f[t][k] = f_g;
        cache->gate_g[t][k] = g_g;
        cache->gate_o[t][k] = o_g;
        cache->tanh_c[t][k] = tc;
      }
    }
    if (cache) {
      cache->h[t + 1] = h;
      cache->c[t + 1] = c;
    }
    h_prev = h;
    c_prev = c;
    outputs.push_back(std::move(h));
  }
  return outputs;
}

void lstm_backward(const LstmLayer& layer, const LstmCache& cache,
                   const std::vector<std::vector<double>>& upstream_h,
                   std::vector<Matrix>& grads, std::size_t grad_offset) {
  if (upstream_h.size() != cache.steps) {
    throw StateError("lstm_backward: upstream/cache step counts differ");
  }
  const std::size_t n = layer.hidden_dim;
  Matrix& g_w_xi = grads[grad_offset + 0];
  Matrix& g_w_hi = grads[grad_offset + 1];
  Matrix& g_w_xf = grads[grad_offset + 2];
  Matrix& g_w_hf = grads[grad_offset + 3];
  Matrix& g_w_xc = grads[grad_offset + 4];
  Matrix& g_w_hc = grads[grad_offset + 5];
  Matrix& g_w_xo = grads[grad_offset + 6];
  Matrix& g_w_ho = grads[grad_offset + 7];
  Matrix& g_b_i = grads[grad_offset + 8];
  Matrix& g_b_f = grads[grad_offset + 9];
  Matrix& g_b_c = grads[grad_offset + 10];
  Matrix& g_b_o = grads[grad_offset + 11];

  std::vector<double> dh_next(n, 0.0), dc_next(n, 0.0);
  std::vector<double> dai(n), daf(n), dag(n), dao(n);
  for (std::size_t ti = cache.steps; ti-- > 0;) {
    const std::vector<double>& i_g = cache.gate_i[ti];
    const std::vector<double>& f_g = cache.gate_f[ti];
    const std::vector<double>& g_g = cache.gate_g[ti];
    const std::vector<double>& o_g = cache.gate_o[ti];
    const std::vector<double>& tc = cache.tanh_c[ti];
    const std::vector<double>& c_prev = cache.c[ti];

    for (std::size_t k = 0; k < n; ++k) {
      const double dh = upstream_h[ti][k] + dh_next[k];
      const double dc = dh * o_g[k] * (1.0 - tc[k] * tc[k]) + dc_next[k];
      const double d_o = dh * tc[k];
      const double d_i = dc * g_g[k];
      const double d_g = dc * i_g[k];
      const double d_f = dc * c_prev[k];
      dai[k] = d_i * i_g[k] * (1.0 - i_g[k]);
      daf[k] = d_f * f_g[k] * (1.0 - f_g[k]);
      dag[k] = d_g * (1.0 - g_g[k] * g_g[k]);
      dao[k] = d_o * o_g[k] * (1.0 - o_g[k]);
      dc_next[k] = dc * f_g[k];
      g_b_i.data[k] += dai[k];
      g_b_f.data[k] += daf[k];
      g_b_c.data[k] += dag[k];
      g_b_o.data[k] += dao[k];
    }

    const std::vector<double>& x = cache.x[ti];
    const std::vector<double>& h_prev = cache.h[ti];
    add_outer(g_w_xi, dai, x);
    add_outer(g_w_hi, dai, h_prev);
    add_outer(g_w_xf, daf, x);
    add_outer(g_w_hf, daf, h_prev);
    add_outer(g_w_xc, dag, x);
    add_outer(g_w_hc, dag, h_prev);
    add_outer(g_w_xo, dao, x);
    add_outer(g_w_ho, dao, h_prev);

    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    matvec_transposed(layer.w_hi, dai, dh_next);
    matvec_transposed(layer.w_hf, daf, dh_next);
    matvec_transposed(layer.w_hc, dag, dh_next);
    matvec_transposed(layer.w_ho, dao, dh_next);
  }
}

std::size_t VisualModel::input_dim() const {
  return front == VisualFront::kRecurrent ? lstm.input_dim : front_dense.w.cols;
}

std::vector<Matrix*> VisualModel::params() {
  std::vector<Matrix*> out;
  if (front == VisualFront::kRecurrent) {
    out = lstm.params();
  } else {
    out = {&front_dense.w, &front_dense.b};
  }
  out.push_back(&dense.w);
  out.push_back(&dense.b);
  out.push_back(&embed.w);
  out.push_back(&embed.b);
  return out;
}

std::vector<const Matrix*> VisualModel::params() const {
  std::vector<const Matrix*> out;
  if (front == VisualFront::kRecurrent) {
    out = lstm.params();
  } else {
    out = {&front_dense.w, &front_dense.b};
  }
  out.push_back(&dense.w);
  out.push_back(&dense.b);
  out.push_back(&embed.w);
  out.push_back(&embed.b);
  return out;
}

std::vector<Matrix*> SemanticModel::params() {
  return {&hidden.w, &hidden.b, &embed.w, &embed.b};
}

std::vector<const Matrix*> SemanticModel::params() const {
  return {&hidden.w, &hidden.b, &embed.w, &embed.b};
}

VisualEmbedding visual_embed(const VisualModel& model, const Matrix& segments, bool training,
                             Rng& rng) {
  if (segments.cols != model.input_dim()) {
    throw ShapeError("visual_embed: segment dim " + std::to_string(segments.cols) +
                     " expected " + std::to_string(model.input_dim()));
  }
  const std::size_t steps = segments.rows;
  std::vector<std::vector<double>> inputs(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    auto row = segments.row(t);
    inputs[t].assign(row.begin(), row.end());
  }

  VisualEmbedding out;
  VisualCache& cache = out.cache;
  cache.training = training;

  if (model.front == VisualFront::kRecurrent) {
    cache.front_out = lstm_forward(model.lstm, inputs, &cache.lstm);
  } else {
    cache.front_out.resize(steps);
    cache.front_pre.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      cache.front_pre[t] = linear_forward(model.front_dense, inputs[t]);
      cache.front_out[t] = cache.front_pre[t];
      for (double& v : cache.front_out[t]) v = v > 0.0 ? v : 0.0;
    }
    // the dense front keeps its inputs in the (otherwise unused) lstm cache slot
    cache.lstm.x = std::move(inputs);
  }

  const bool use_dropout = training && model.dropout_rate > 0.0;
  if (use_dropout) {
    const double keep = 1.0 - model.dropout_rate;
    cache.drop_scale.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      cache.drop_scale[t].resize(cache.front_out[t].size());
      for (std::size_t k = 0; k < cache.front_out[t].size(); ++k) {
        const double scale = rng.next_double() < keep ? 1.0 / keep : 0.0;
        cache.drop_scale[t][k] = scale;
        cache.front_out[t][k] *= scale;
      }
    }
  }

  out.embeddings = Matrix(steps, model.embed_dim());
  cache.dense_pre.resize(steps);
  cache.dense_act.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    cache.dense_pre[t] = linear_forward(model.dense, cache.front_out[t]);
    cache.dense_act[t] = cache.dense_pre[t];
    for (double& v : cache.dense_act[t]) v = v > 0.0 ? v : 0.0;
    std::vector<double> e = linear_forward(model.embed, cache.dense_act[t]);
    for (std::size_t j = 0; j < e.size(); ++j) out.embeddings(t, j) = e[j];
  }
  require_finite(out.embeddings, "visual_embed");
  return out;
}

std::vector<Matrix> visual_backward(const VisualModel& model, const VisualEmbedding& emb,
                                    const Matrix& upstream) {
  const std::size_t steps = emb.embeddings.rows;
  if (upstream.rows != steps || upstream.cols != model.embed_dim()) {
    throw ShapeError("visual_backward: upstream shape mismatch");
  }
  if (emb.cache.dense_act.size() != steps) {
    throw StateError("visual_backward: cache does not match embedding");
  }
  auto param_ptrs = model.params();
  std::vector<Matrix> grads = zero_grads_like(param_ptrs);
  const std::size_t tail = grads.size();
  Matrix& g_dense_w = grads[tail - 4];
  Matrix& g_dense_b = grads[tail - 3];
  Matrix& g_embed_w = grads[tail - 2];
  Matrix& g_embed_b = grads[tail - 1];

  const bool dropped = !emb.cache.drop_scale.empty();
  std::vector<std::vector<double>> d_front(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    auto de = upstream.row(t);
    add_outer(g_embed_w, de, emb.cache.dense_act[t]);
    for (std::size_t j = 0; j < de.size(); ++j) g_embed_b.data[j] += de[j];

    std::vector<double> dz(model.dense.w.rows, 0.0);
    matvec_transposed(model.embed.w, de, dz);
    for (std::size_t j = 0; j < dz.size(); ++j) {
      if (emb.cache.dense_pre[t][j] <= 0.0) dz[j] = 0.0;
    }
    add_outer(g_dense_w, dz, emb.cache.front_out[t]);
    for (std::size_t j = 0; j < dz.size(); ++j) g_dense_b.data[j] += dz[j];

    d_front[t].assign(model.dense.w.cols, 0.0);
    matvec_transposed(model.dense.w, dz, d_front[t]);
    if (dropped) {
      for (std::size_t k = 0; k < d_front[t].size(); ++k) {
        d_front[t][k] *= emb.cache.drop_scale[t][k];
      }
    }
  }

  if (model.front == VisualFront::kRecurrent) {
    lstm_backward(model.lstm, emb.cache.lstm, d_front, grads, 0);
  } else {
    Matrix& g_front_w = grads[0];
    Matrix& g_front_b = grads[1];
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t k = 0; k < d_front[t].size(); ++k) {
        if (emb.cache.front_pre[t][k] <= 0.0) d_front[t][k] = 0.0;
      }
      add_outer(g_front_w, d_front[t], emb.cache.lstm.x[t]);
      for (std::size_t k = 0; k < d_front[t].size(); ++k) g_front_b.data[k] += d_front[t][k];
    }
  }
  return grads;
}

std::vector<double> semantic_embed(const SemanticModel& model, std::span<const double> s,
                                   SemanticCache* cache) {
  if (s.size() != model.input_dim()) {
    throw ShapeError("semantic_embed: input dim " + std::to_string(s.size()) + " expected " +
                     std::to_string(model.input_dim()));
  }
  std::vector<double> pre = linear_forward(model.hidden, s);
  std::vector<double> act = pre;
  for (double& v : act) v = v > 0.0 ? v : 0.0;
  std::vector<double> out = linear_forward(model.embed, act);
  if (cache) {
    cache->input.assign(s.begin(), s.end());
    cache->hidden_pre = std::move(pre);
    cache->hidden_act = act;
  }
  require_finite(out, "semantic_embed");
  return out;
}

std::vector<Matrix> semantic_backward(const SemanticModel& model, const SemanticCache& cache,
                                      std::span<const double> upstream) {
  if (upstream.size() != model.embed_dim()) {
    throw ShapeError("semantic_backward: upstream dim mismatch");
  }
  if (cache.hidden_act.size() != model.hidden.w.rows) {
    throw StateError("semantic_backward: cache does not match model");
  }
  std::vector<Matrix> grads = zero_grads_like(model.params());
  add_outer(grads[2], upstream, cache.hidden_act);
  for (std::size_t j = 0; j < upstream.size(); ++j) grads[3].data[j] += upstream[j];

  std::vector<double> dh(model.hidden.w.rows, 0.0);
  matvec_transposed(model.embed.w, upstream, dh);
  for (std::size_t j = 0; j < dh.size(); ++j) {
    if (cache.hidden_pre[j] <= 0.0) dh[j] = 0.0;
  }
  add_outer(grads[0], dh, cache.input);
  for (std::size_t j = 0; j < dh.size(); ++j) grads[1].data[j] += dh[j];
  return grads;
}

VisualModel init_visual_model(const VisualDims& dims, double dropout_rate, Rng& rng,
                              VisualFront front) {
  if (dims.d_x == 0 || dims.n1 == 0 || dims.n2 == 0 || dims.d_e == 0) {
    throw ConfigError("init_visual_model: all dimensions must be >= 1");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ConfigError("init_visual_model: dropout rate must lie in [0,1)");
  }
  VisualModel m;
  m.front = front;
  m.dropout_rate = dropout_rate;
  if (front == VisualFront::kRecurrent) {
    LstmLayer& l = m.lstm;
    l.input_dim = dims.d_x;
    l.hidden_dim = dims.n1;
    l.w_xi = Matrix(dims.n1, dims.d_x);
    l.w_hi = Matrix(dims.n1, dims.n1);
    l.w_xf = Matrix(dims.n1, dims.d_x);
    l.w_hf = Matrix(dims.n1, dims.n1);
    l.w_xc = Matrix(dims.n1, dims.d_x);
    l.w_hc = Matrix(dims.n1, dims.n1);
    l.w_xo = Matrix(dims.n1, dims.d_x);
    l.w_ho = Matrix(dims.n1, dims.n1);
    for (Matrix* w : {&l.w_xi, &l.w_hi, &l.w_xf, &l.w_hf, &l.w_xc, &l.w_hc, &l.w_xo, &l.w_ho}) {
      init_fan_uniform(*w, rng);
    }
    l.b_i = bias(dims.n1);
    l.b_f = bias(dims.n1);
    l.b_c = bias(dims.n1);
    l.b_o = bias(dims.n1);
    l.b_f.fill(1.0);  // open forget gates at the start of training
  } else {
    m.front_dense.w = Matrix(dims.n1, dims.d_x);
    init_fan_uniform(m.front_dense.w, rng);
    m.front_dense.b = bias(dims.n1);
  }
  m.dense.w = Matrix(dims.n2, dims.n1);
  init_fan_uniform(m.dense.w, rng);
  m.dense.b = bias(dims.n2);
  m.embed.w = Matrix(dims.d_e, dims.n2);
  init_fan_uniform(m.embed.w, rng);
  m.embed.b = bias(dims.d_e);
  return m;
}

SemanticModel init_semantic_model(const SemanticDims& dims, Rng& rng) {
  if (dims.d_s == 0 || dims.n1s == 0 || dims.d_e == 0) {
    throw ConfigError("init_semantic_model: all dimensions must be >= 1");
  }
  SemanticModel m;
  m.hidden.w = Matrix(dims.n1s, dims.d_s);
  init_fan_uniform(m.hidden.w, rng);
  m.hidden.b = bias(dims.n1s);
  m.embed.w = Matrix(dims.d_e, dims.n1s);
  init_fan_uniform(m.embed.w, rng);
  m.embed.b = bias(dims.d_e);
  return m;
}

}  // namespace mlzsr
