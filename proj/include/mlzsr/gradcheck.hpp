#ifndef MLZSR_GRADCHECK_HPP_
#define MLZSR_GRADCHECK_HPP_

#include <functional>
#include <span>
#include <vector>

namespace mlzsr {

// Central-difference gradient estimate, (f(x+h e_i) - f(x-h e_i)) / 2h per
// coordinate. Independent of every analytic backward pass in this project and
// used to verify all of them.
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h);

// Relative error between an analytic and a numeric gradient entry; pairs where
// both magnitudes sit below 1e-8 count as exact.
double gradient_rel_error(std::span<const double> analytic, std::span<const double> numeric);

}  // namespace mlzsr

#endif  // MLZSR_GRADCHECK_HPP_
