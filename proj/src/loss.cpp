#include "mlzsr/loss.hpp"

#include <cmath>
#include <string>

#include "mlzsr/errors.hpp"
#include "mlzsr/matrix.hpp"

namespace mlzsr {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_pair(std::span<const double> scores, std::span<const int> targets) {
  if (scores.empty()) throw ShapeError("rank loss: empty score vector");
  if (scores.size() != targets.size()) {
    throw ShapeError("rank loss: scores " + std::to_string(scores.size()) + " vs targets " +
                     std::to_string(targets.size()));
  }
  for (int y : targets) {
    if (y != 1 && y != -1) throw DataError("rank loss: targets must be +1 or -1");
  }
  require_finite(scores, "rank loss scores");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_by_sign(
    std::span<const int> targets) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    (targets[j] == 1 ? pos : neg).push_back(j);
  }
  return {std::move(pos), std::move(neg)};
}

LossResult ranknet_core(std::span<const double> scores, std::span<const int> targets,
                        RegularizerForm form) {
  check_pair(scores, targets);
  auto [pos, neg] = split_by_sign(targets);
  const double weight =
      1.0 / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()) +
             static_cast<double>(scores.size()));

  LossResult out;
  out.grad.assign(scores.size(), 0.0);
  double total = 0.0;
  for (std::size_t p : pos) {
    for (std::size_t q : neg) {
      const double diff = scores[q] - scores[p];
      total += softplus(diff);
      const double s = sigmoid(diff);
      out.grad[q] += s;
      out.grad[p] -= s;
    }
  }
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const double z = -static_cast<double>(targets[j]) * scores[j];
    if (form == RegularizerForm::kSoftplus) {
      total += softplus(z);
      out.grad[j] -= static_cast<double>(targets[j]) * sigmoid(z);
    } else {
      total += 1.0 + std::exp(z);
      out.grad[j] -= static_cast<double>(targets[j]) * std::exp(z);
    }
  }
  out.loss = weight * total;
  for (double& g : out.grad) g *= weight;
  return out;
}

LossResult hinge_core(std::span<const double> scores, std::span<const int> targets,
                      double margin) {
  if (margin <= 0.0) throw ConfigError("hinge rank loss: margin must be positive");
  check_pair(scores, targets);
  auto [pos, neg] = split_by_sign(targets);
  const double weight =
      1.0 / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()) +
             static_cast<double>(scores.size()));

  LossResult out;
  out.grad.assign(scores.size(), 0.0);
  double total = 0.0;
  for (std::size_t p : pos) {
    for (std::size_t q : neg) {
      const double v = margin - scores[p] + scores[q];
      if (v > 0.0) {
        total += v;
        out.grad[p] -= 1.0;
        out.grad[q] += 1.0;
      }
    }
  }
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const double v = margin - static_cast<double>(targets[j]) * scores[j];
    if (v > 0.0) {
      total += v;
      out.grad[j] -= static_cast<double>(targets[j]);
    }
  }
  out.loss = weight * total;
  for (double& g : out.grad) g *= weight;
  return out;
}

}  // namespace

double softplus(double x) {
  return (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

LossResult ranknet_visual_loss(std::span<const double> scores, std::span<const int> targets) {
  return ranknet_core(scores, targets, RegularizerForm::kSoftplus);
}

LossResult ranknet_semantic_loss(std::span<const double> scores, std::span<const int> targets,
                                 RegularizerForm form) {
  return ranknet_core(scores, targets, form);
}

LossResult hinge_visual_loss(std::span<const double> scores, std::span<const int> targets,
                             double margin) {
  return hinge_core(scores, targets, margin);
}

LossResult hinge_semantic_loss(std::span<const double> scores, std::span<const int> targets,
                               double margin) {
  return hinge_core(scores, targets, margin);
}

}  // namespace mlzsr
