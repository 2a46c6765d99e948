#ifndef MLZSR_BASELINES_HPP_
#define MLZSR_BASELINES_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mlzsr/data.hpp"
#include "mlzsr/matrix.hpp"
#include "mlzsr/model.hpp"
#include "mlzsr/rng.hpp"

namespace mlzsr {

// ---- ablation helpers -------------------------------------------------

// Visual model whose recurrent layer is replaced by a per-segment dense ReLU
// layer of n1 units; everything else matches the full model.
VisualModel build_nrc_model(const VisualDims& dims, double dropout_rate, Rng& rng);

// Unit-L2 random semantic table: one i.i.d. standard normal row per label,
// scaled to norm 1.
Matrix randomize_label_reps(std::size_t vocab_size, std::size_t semantic_dim, std::uint64_t seed);

// Copy of the dataset with its semantic table swapped out.
Dataset with_semantics(const Dataset& ds, Matrix semantics);

// Mean over the T segment rows; the instance-level feature the comparison
// methods run on.
std::vector<double> instance_feature(const Instance& inst);
Matrix instance_features(const Dataset& ds, const std::vector<int>& instance_ids);

// ---- linear models ----------------------------------------------------

enum class LinearLoss : std::uint8_t { kSquared = 0, kHinge = 1, kLogistic = 2 };

// Multi-output linear map fitted by full-batch Adam with an L2 penalty; the
// gradient-descent stand-in for the SVM/SVR fits of the comparison methods.
struct LinearModel {
  Matrix w;               // outputs x inputs
  std::vector<double> b;  // outputs
  double lambda = 0.0;
  LinearLoss loss = LinearLoss::kSquared;
};

struct LinearFitOptions {
  double lambda = 0.0;
  std::size_t steps = 400;
  double lr = 0.05;
};

// targets: N x outputs. Squared loss regresses real targets; hinge/logistic
// expect +1/-1 entries and fit each output as a one-vs-rest classifier.
LinearModel fit_linear(const Matrix& features, const Matrix& targets, LinearLoss loss,
                       const LinearFitOptions& opts);

std::vector<double> linear_predict(const LinearModel& model, std::span<const double> x);

// Soft-margin C of the replaced SVM/SVR mapped onto the L2 penalty.
double lambda_from_soft_margin(double c, std::size_t n);

// ---- comparison methods ------------------------------------------------

// Direct semantic prediction: ridge regression from instance features to the
// mean semantic vector of the instance's training labels; scores are dot
// products between the predicted vector and each label's semantic vector.
struct DspModel {
  LinearModel reg;
};

DspModel dsp_fit(const Matrix& features, const Matrix& mean_semantic_targets,
                 const LinearFitOptions& opts);
std::vector<double> dsp_predict(const DspModel& model, std::span<const double> x,
                                const Dataset& ds, const std::vector<int>& label_ids);

enum class WeightNorm : std::uint8_t { kL2 = 0, kL1 = 1 };

// Convex-combination method: one-vs-rest logistic classifiers over the known
// labels; prediction combines the semantic vectors of the top known labels,
// weighted by normalized conditional probabilities.
struct ConseModel {
  LinearModel classifiers;     // one row per known label
  std::vector<int> known_labels;
  std::size_t top_n = 5;
  WeightNorm norm = WeightNorm::kL2;
};

ConseModel conse_fit(const Matrix& features, const std::vector<std::vector<int>>& train_labels,
                     const std::vector<int>& known_labels, const LinearFitOptions& opts,
                     std::size_t top_n = 5, WeightNorm norm = WeightNorm::kL2);
std::vector<double> conse_predict(const ConseModel& model, std::span<const double> x,
                                  const Dataset& ds, const std::vector<int>& label_ids);

// Classifier-parameter transfer: one-vs-rest hinge classifiers for the known
// labels; an unseen label's classifier is the beta-weighted sum of the known
// ones, beta = softmax of negative semantic distances.
struct CostaModel {
  LinearModel classifiers;  // one row per known label
  std::vector<int> known_labels;
};

CostaModel costa_fit(const Matrix& features, const std::vector<std::vector<int>>& train_labels,
                     const std::vector<int>& known_labels, const LinearFitOptions& opts);

// Row c holds beta_{c,k} over known labels; every row sums to 1.
Matrix costa_betas(const Dataset& ds, const std::vector<int>& known_labels,
                   const std::vector<int>& unseen_labels);

std::vector<double> costa_predict(const CostaModel& model, std::span<const double> x,
                                  const std::vector<int>& label_ids, const Matrix& betas,
                                  const std::vector<int>& unseen_labels);

}  // namespace mlzsr

#endif  // MLZSR_BASELINES_HPP_
