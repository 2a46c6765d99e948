#ifndef MLZSR_ADAM_HPP_
#define MLZSR_ADAM_HPP_

#include "mlzsr/matrix.hpp"

namespace mlzsr {

// Adam with the usual defaults; moments live alongside the parameter block
// they belong to.
struct AdamState {
  Matrix m;  // first moment, shaped like the parameters
  Matrix v;  // second moment
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  AdamState(std::size_t rows, std::size_t cols, double learning_rate)
      : m(rows, cols), v(rows, cols), lr(learning_rate) {}
};

// One bias-corrected update, in place. Throws ShapeError on mismatched shapes
// and NumericError on non-finite gradients.
void adam_step(Matrix& params, const Matrix& grads, AdamState& state);

}  // namespace mlzsr

#endif  // MLZSR_ADAM_HPP_
