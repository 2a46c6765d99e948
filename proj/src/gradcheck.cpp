#include "mlzsr/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "mlzsr/errors.hpp"

namespace mlzsr {

std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h) {
  if (h <= 0.0) throw ConfigError("finite_diff_grad: step must be positive");
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = point[i];
    point[i] = xi + h;
    const double fp = f(point);
    point[i] = xi - h;
    const double fm = f(point);
    point[i] = xi;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError("finite_diff_grad: objective is non-finite");
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double gradient_rel_error(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) throw ShapeError("gradient_rel_error: length mismatch");
  // The denominator floor keeps central-difference roundoff (~1e-11 absolute
  // at h = 1e-5) from swamping the ratio on near-zero entries.
  constexpr double kFloor = 1e-4;
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = std::fabs(analytic[i]);
    const double n = std::fabs(numeric[i]);
    worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / std::max({a, n, kFloor}));
  }
  return worst;
}

}  // namespace mlzsr
