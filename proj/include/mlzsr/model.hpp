#ifndef MLZSR_MODEL_HPP_
#define MLZSR_MODEL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mlzsr/matrix.hpp"
#include "mlzsr/rng.hpp"

namespace mlzsr {

// Single LSTM layer. Gates and cell state share the hidden dimension; the
// initial hidden and cell states are zero.
struct LstmLayer {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Matrix w_xi, w_hi, w_xf, w_hf, w_xc, w_hc, w_xo, w_ho;
  Matrix b_i, b_f, b_c, b_o;  // hidden_dim x 1

  std::vector<Matrix*> params();
  std::vector<const Matrix*> params() const;
};

struct LstmCache {
  std::size_t steps = 0;
  // Index t holds the values computed at step t; h_prev/c_prev include the
  // zero initial state at index 0.
  std::vector<std::vector<double>> x, h, c, gate_i, gate_f, gate_g, gate_o, tanh_c;
};

// Runs the gate recurrence over a sequence of input vectors; the cache keeps
// everything the backward pass needs.
std::vector<std::vector<double>> lstm_forward(const LstmLayer& layer,
                                              const std::vector<std::vector<double>>& inputs,
                                              LstmCache* cache);

// Accumulates parameter gradients for upstream dL/dh_t; grads must be shaped
// like layer.params().
void lstm_backward(const LstmLayer& layer, const LstmCache& cache,
                   const std::vector<std::vector<double>>& upstream_h,
                   std::vector<Matrix>& grads, std::size_t grad_offset);

// Fully connected layer, weights (out x in), bias (out x 1).
struct Linear {
  Matrix w;
  Matrix b;
};

enum class VisualFront : std::uint8_t {
  kRecurrent = 0,  // LSTM over segments
  kDense = 1,      // per-segment dense ReLU (the non-recurrent ablation)
};

// LSTM (or per-segment dense) -> dense ReLU -> linear embedding. Dropout is
// applied to the first layer's outputs, training mode only, inverted scaling.
struct VisualModel {
  VisualFront front = VisualFront::kRecurrent;
  LstmLayer lstm;
  Linear front_dense;  // used when front == kDense
  Linear dense;        // n2 x n1, ReLU
  Linear embed;        // d_e x n2, linear
  double dropout_rate = 0.0;

  std::size_t input_dim() const;
  std::size_t embed_dim() const { return embed.w.rows; }
  std::vector<Matrix*> params();
  std::vector<const Matrix*> params() const;
};

// dense ReLU -> linear embedding over a semantic vector.
struct SemanticModel {
  Linear hidden;  // n1s x d_s, ReLU
  Linear embed;   // d_e x n1s, linear

  std::size_t input_dim() const { return hidden.w.cols; }
  std::size_t embed_dim() const { return embed.w.rows; }
  std::vector<Matrix*> params();
  std::vector<const Matrix*> params() const;
};

struct VisualCache {
  bool training = false;
  LstmCache lstm;
  std::vector<std::vector<double>> front_out;   // first-layer outputs, pre dropout
  std::vector<std::vector<double>> front_pre;   // dense-front pre-activations (kDense only)
  std::vector<std::vector<double>> drop_scale;  // per-entry mask * 1/keep, empty when unused
  std::vector<std::vector<double>> dense_pre;
  std::vector<std::vector<double>> dense_act;
};

// Per-segment embeddings (T x d_e) plus the activations needed for backprop.
struct VisualEmbedding {
  Matrix embeddings;
  VisualCache cache;
};

// Forward pass over T segment vectors (segments is T x d_x). With training set,
// dropout masks are drawn from rng; inference ignores rng entirely.
VisualEmbedding visual_embed(const VisualModel& model, const Matrix& segments, bool training,
                             Rng& rng);

// Parameter gradients of <upstream, embeddings>; upstream is T x d_e. The
// cache must come from a forward pass of this model.
std::vector<Matrix> visual_backward(const VisualModel& model, const VisualEmbedding& emb,
                                    const Matrix& upstream);

struct SemanticCache {
  std::vector<double> input;
  std::vector<double> hidden_pre;
  std::vector<double> hidden_act;
};

std::vector<double> semantic_embed(const SemanticModel& model, std::span<const double> s,
                                   SemanticCache* cache = nullptr);

std::vector<Matrix> semantic_backward(const SemanticModel& model, const SemanticCache& cache,
                                      std::span<const double> upstream);

struct VisualDims {
  std::size_t d_x = 0, n1 = 0, n2 = 0, d_e = 0;
};

struct SemanticDims {
  std::size_t d_s = 0, n1s = 0, d_e = 0;
};

// Fan-based uniform weights, zero biases, forget-gate bias 1.
VisualModel init_visual_model(const VisualDims& dims, double dropout_rate, Rng& rng,
                              VisualFront front = VisualFront::kRecurrent);
SemanticModel init_semantic_model(const SemanticDims& dims, Rng& rng);

// Zero matrices shaped like the model's parameter list.
template <typename MatrixPtr>
std::vector<Matrix> zero_grads_like(const std::vector<MatrixPtr>& params) {
  std::vector<Matrix> grads;
  grads.reserve(params.size());
  for (const Matrix* p : params) grads.emplace_back(p->rows, p->cols);
  return grads;
}

}  // namespace mlzsr

#endif  // MLZSR_MODEL_HPP_
