#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ltr/config.hpp"
#include "ltr/dataset.hpp"
#include "ltr/tree.hpp"

namespace ltr {

struct TreeEnsemble {
  enum class Mode { boosted, bagged };

  Mode mode = Mode::boosted;
  double learning_rate = 1.0;  // applied per tree in boosted mode
  std::vector<RegressionTree> trees;

  // Boosted: learning_rate * sum of tree outputs. Bagged: mean of tree
  // outputs. Empty ensemble scores 0.
  double predict(const FeatureVector& fv) const;
};

double predict(const TreeEnsemble& ensemble, const FeatureVector& fv);

struct LambdaMartConfig {
  int num_leaves = 15;
  double min_instance_pct = 0.25;  // percent of training instances per leaf
  double learning_rate = 0.05;
  double sub_sampling = 0.5;      // fraction of queries per round
  double feature_sampling = 0.5;  // fraction of features per round
  int num_trees = 2000;
  int truncation_k = 10;  // NDCG truncation used inside the lambda weights
  std::uint64_t seed = 0;
  bool print_progress = false;

  static LambdaMartConfig from_config(const KeyValueConfig& cfg);
  void validate() const;
};

struct LambdaState {
  std::vector<double> lambdas;
  std::vector<double> weights;
};

// Pairwise gradients of NDCG-weighted logistic loss for one query. For every
// pair (i, j) with grade_i > grade_j:
//   rho        = 1 / (1 + exp(score_i - score_j))
//   delta      = |swap change of NDCG@k|, normalized by the query's ideal DCG
//   lambda_i  += rho * delta        lambda_j -= rho * delta
//   weight_i  += rho*(1-rho)*delta  weight_j += rho*(1-rho)*delta
// Ranks for the discount come from sorting scores descending, ties by
// position. All-equal grades leave the state zero.
LambdaState compute_lambdas(std::span<const int> grades,
                            std::span<const double> scores, int truncation_k);

TreeEnsemble train_lambdamart(const DatasetView& view, Objective objective,
                              const LambdaMartConfig& config);

struct RandomForestConfig {
  int num_trees = 60;
  double bag_fraction = 0.7;      // fraction of queries per tree
  double feature_fraction = 0.3;  // fraction of features per tree
  int num_leaves = 16;
  int min_instances = 1;
  std::uint64_t seed = 0;

  static RandomForestConfig from_config(const KeyValueConfig& cfg);
};

// Bagged regression trees fit pointwise to the integer grades; each tree
// sees a seeded sample of queries taken without replacement, so a full bag
// reproduces a single fitted tree.
TreeEnsemble train_random_forest(const DatasetView& view, Objective objective,
                                 const RandomForestConfig& config);

}  // namespace ltr
