#ifndef MLZSR_VERIFY_HPP_
#define MLZSR_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mlzsr/matrix.hpp"

namespace mlzsr {

// Analytic-vs-central-difference checks over seeded random instances with
// small dimensions (T <= 5, layer widths <= 8). One entry per component.
struct GradCheckResult {
  std::string component;
  std::size_t cases = 0;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct GradCheckOptions {
  std::uint64_t seed = 7;
  std::size_t cases_per_component = 20;
  double model_tolerance = 1e-4;
  double loss_tolerance = 1e-6;
  double step = 1e-5;
};

std::vector<GradCheckResult> run_gradient_checks(const GradCheckOptions& opts);

// Parameter flattening used by the checks and by tests.
template <typename MatrixPtr>
std::vector<double> flatten_params(const std::vector<MatrixPtr>& params) {
  std::vector<double> out;
  for (const Matrix* p : params) out.insert(out.end(), p->data.begin(), p->data.end());
  return out;
}

void unflatten_params(const std::vector<double>& theta, const std::vector<Matrix*>& params);

}  // namespace mlzsr

#endif  // MLZSR_VERIFY_HPP_
