#ifndef MLZSR_LOSS_HPP_
#define MLZSR_LOSS_HPP_

#include <span>
#include <vector>

namespace mlzsr {

// Which form the per-entry regularizer of the semantic RankNet loss takes.
// kSoftplus mirrors the visual loss; kLiteral keeps the bare 1+exp(-y*o) term.
enum class RegularizerForm {
  kSoftplus,
  kLiteral,
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;
};

// Regularized RankNet rank loss over one score/target vector:
//   w * [ sum_{p in +} sum_{q in -} softplus(o_q - o_p) + sum_j softplus(-y_j o_j) ]
// with w = 1 / (|+| * |-| + len). Targets must be exactly +1/-1.
LossResult ranknet_visual_loss(std::span<const double> scores, std::span<const int> targets);
LossResult ranknet_semantic_loss(std::span<const double> scores, std::span<const int> targets,
                                 RegularizerForm form = RegularizerForm::kSoftplus);

// Regularized hinge rank loss with margin m > 0:
//   w * [ sum_{p,q} max(0, m - o_p + o_q) + sum_j max(0, m - y_j o_j) ]
// Subgradient 0 at the kinks.
LossResult hinge_visual_loss(std::span<const double> scores, std::span<const int> targets,
                             double margin);
LossResult hinge_semantic_loss(std::span<const double> scores, std::span<const int> targets,
                               double margin);

// Overflow-safe log(1 + exp(x)).
double softplus(double x);

}  // namespace mlzsr

#endif  // MLZSR_LOSS_HPP_
