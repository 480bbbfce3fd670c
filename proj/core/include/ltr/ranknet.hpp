#pragma once

#include <cstdint>
#include <vector>

#include "ltr/config.hpp"
#include "ltr/dataset.hpp"

namespace ltr {

// One sigmoid hidden layer feeding a linear output:
//   score(x) = w2 . sigmoid(W1 x + b1) + b2
struct RankNetModel {
  int input_dim = 0;
  int hidden_dim = 0;
  std::vector<double> w1;  // hidden_dim x input_dim, row-major
  std::vector<double> b1;  // hidden_dim
  std::vector<double> w2;  // hidden_dim
  double b2 = 0.0;

  double score(const FeatureVector& fv) const;
};

struct RankNetConfig {
  int hidden = 10;
  int epochs = 12;
  int pairs_per_epoch = 60000;  // sampled with replacement from all pairs
  double learning_rate = 0.05;  // eta0, decayed to eta0 / (1 + epoch)
  std::uint64_t seed = 0;

  static RankNetConfig from_config(const KeyValueConfig& cfg);
  void validate() const;
};

// Cross entropy of the pair (hi ranked above lo):
//   log(1 + exp(-(score(hi) - score(lo))))
double ranknet_pair_loss(const RankNetModel& model, const FeatureVector& hi,
                         const FeatureVector& lo);

// Gradient of ranknet_pair_loss with respect to every parameter, same
// shapes as the model fields.
struct RankNetGradient {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};
RankNetGradient ranknet_pair_gradient(const RankNetModel& model,
                                      const FeatureVector& hi,
                                      const FeatureVector& lo);

// Seeded SGD over within-query pairs with unequal grades, higher grade as
// the preferred document. Features are standardized internally and the
// scaling is folded into the first layer, so score() consumes raw vectors.
// Throws DataError when no query contains an unequal-grade pair.
RankNetModel train_ranknet(const DatasetView& view, Objective objective,
                           const RankNetConfig& config);

}  // namespace ltr
