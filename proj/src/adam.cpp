#include "mlzsr/adam.hpp"

#include <cmath>

#include "mlzsr/errors.hpp"

namespace mlzsr {

void adam_step(Matrix& params, const Matrix& grads, AdamState& state) {
  if (!params.same_shape(grads) || !params.same_shape(state.m) || !params.same_shape(state.v)) {
    throw ShapeError("adam_step: parameter/gradient/moment shapes differ");
  }
  require_finite(grads, "adam_step gradient");

  state.step += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.data.size(); ++i) {
    const double g = grads.data[i];
    state.m.data[i] = b1 * state.m.data[i] + (1.0 - b1) * g;
    state.v.data[i] = b2 * state.v.data[i] + (1.0 - b2) * g * g;
    const double mhat = state.m.data[i] / bc1;
    const double vhat = state.v.data[i] / bc2;
    params.data[i] -= state.lr * mhat / (std::sqrt(vhat) + state.epsilon);
  }
}

}  // namespace mlzsr
