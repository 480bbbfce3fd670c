#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltr/config.hpp"
#include "ltr/dataset.hpp"

namespace ltr {

enum class LinearLoss { logistic, hinge, squared_hinge, squared };
enum class Regularizer { l1, l2 };

// The six supported (regularizer, loss, mode) combinations. In regressor
// variants the "L1 loss" of the usual naming scheme is absolute error and
// the "L2 loss" is squared error.
enum class LinearVariant {
  l1_logistic,       // l1lr:      L1 penalty, logistic loss, classifier
  l2_logistic,       // l2lr:      L2 penalty, logistic loss, classifier
  l1_squared_hinge,  // l1l2svmc:  L1 penalty, squared hinge, classifier
  l2_hinge,          // l2l1svmc:  L2 penalty, hinge, classifier
  l2_squared,        // l2l2svmr:  L2 penalty, squared error, regressor
  l2_absolute,       // l2l1svmr:  L2 penalty, absolute error, regressor
};

const char* linear_variant_name(LinearVariant v);
LinearVariant linear_variant_from_name(const std::string& name);
// Throws ConfigError for any combination outside the six above.
LinearVariant linear_variant_from_parts(LinearLoss loss, Regularizer reg,
                                        bool classifier);
bool linear_is_classifier(LinearVariant v);
LinearLoss linear_loss(LinearVariant v);
Regularizer linear_regularizer(LinearVariant v);

struct LinearModel {
  std::vector<double> weights;  // weights[j] pairs with feature id j+1
  double bias = 0.0;
  LinearVariant variant = LinearVariant::l2_logistic;
  double cost = 1.0;  // C, the loss weight the model was trained with

  double score(const FeatureVector& fv) const;
};

struct LinearConfig {
  LinearVariant variant = LinearVariant::l2_logistic;
  double cost = 1.0;
  int epochs = 30;
  // eta0, decayed to eta0 / (1 + epoch); each step is further divided by the
  // squared norm of the standardized sample, so eta0 is dimension free.
  double learning_rate = 1.0;
  std::uint64_t seed = 0;

  static LinearConfig from_config(const KeyValueConfig& cfg);
  void validate() const;
};

// Classifier variants binarize the grade (0 -> -1, anything else -> +1);
// regressor variants fit the integer grade itself.
double linear_target(LinearVariant v, int grade);

// The regularized empirical objective the trainer descends:
//   J = R(w) / n + (C / n) * sum_i loss(score_i, target_i)
// where R is |w|_1 or 0.5 |w|_2^2 and the bias is never penalized.
double linear_objective(const LinearModel& model,
                        std::span<const FeatureVector> rows,
                        std::span<const double> targets);

// Full-batch (sub)gradient of linear_objective. Kinks use the subgradient
// that is 0 at the kink: d|w|/dw = sign(w), d hinge = 0 at margin 1,
// d|r|/dr = 0 at r = 0. Bias derivative lands in *bias_grad.
std::vector<double> linear_gradient(const LinearModel& model,
                                    std::span<const FeatureVector> rows,
                                    std::span<const double> targets,
                                    double* bias_grad);

// Seeded stochastic subgradient descent, one shuffled pass per epoch, steps
// normalized by the squared sample norm. The L1 penalty is applied as a
// proximal soft-threshold after each step so weights reach exact zeros.
// Features are standardized internally from the training fold and the result
// is folded back so score() consumes raw vectors.
LinearModel train_linear(const DatasetView& view, Objective objective,
                         const LinearConfig& config);

}  // namespace ltr
