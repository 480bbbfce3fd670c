#include "ltr/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ltr/error.hpp"
#include "ltr/metrics.hpp"
#include "ltr/rng.hpp"

#include <cstdio>

namespace ltr {

double TreeEnsemble::predict(const FeatureVector& fv) const {
  if (trees.empty()) return 0.0;
  double sum = 0.0;
  for (const RegressionTree& t : trees) sum += t.predict(fv);
  return mode == Mode::boosted ? learning_rate * sum
                               : sum / static_cast<double>(trees.size());
}

double predict(const TreeEnsemble& ensemble, const FeatureVector& fv) {
  return ensemble.predict(fv);
}

LambdaMartConfig LambdaMartConfig::from_config(const KeyValueConfig& cfg) {
  LambdaMartConfig c;
  c.num_leaves = static_cast<int>(cfg.get_int("trees.num-leaves", c.num_leaves));
  c.min_instance_pct = cfg.get_double("trees.min-instance-percentage-per-leaf",
                                      c.min_instance_pct);
  c.feature_sampling = cfg.get_double("trees.feature-sampling", c.feature_sampling);
  c.learning_rate = cfg.get_double("boosting.learning-rate", c.learning_rate);
  c.sub_sampling = cfg.get_double("boosting.sub-sampling", c.sub_sampling);
  c.num_trees = static_cast<int>(cfg.get_int("boosting.num-trees", c.num_trees));
  c.truncation_k = static_cast<int>(cfg.get_int("boosting.truncation-k", c.truncation_k));
  c.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  c.print_progress =
      cfg.get_bool("params.print-intermediate-valid-measurements", false);
  std::string metric = cfg.get_string("learning.evaluation-metric", "NDCG");
  if (metric != "NDCG")
    throw ConfigError("unsupported evaluation metric: " + metric);
  c.validate();
  return c;
}

void LambdaMartConfig::validate() const {
  if (num_leaves < 1) throw ConfigError("trees.num-leaves must be >= 1");
  if (min_instance_pct < 0.0 || min_instance_pct > 100.0)
    throw ConfigError("trees.min-instance-percentage-per-leaf out of range");
  if (learning_rate <= 0.0) throw ConfigError("boosting.learning-rate must be > 0");
  if (sub_sampling <= 0.0 || sub_sampling > 1.0)
    throw ConfigError("boosting.sub-sampling must be in (0,1]");
  if (feature_sampling <= 0.0 || feature_sampling > 1.0)
    throw ConfigError("trees.feature-sampling must be in (0,1]");
  if (num_trees < 0) throw ConfigError("boosting.num-trees must be >= 0");
  if (truncation_k < 1) throw ConfigError("boosting.truncation-k must be >= 1");
}

LambdaState compute_lambdas(std::span<const int> grades,
                            std::span<const double> scores, int truncation_k) {
  const std::size_t n = grades.size();
  if (scores.size() != n) throw DataError("compute_lambdas: length mismatch");
  LambdaState state;
  state.lambdas.assign(n, 0.0);
  state.weights.assign(n, 0.0);
  if (n < 2) return state;

  // Rank positions under the current scores (descending, stable).
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::uint32_t a, std::uint32_t b) {
                     return scores[a] > scores[b];
                   });
  std::vector<int> pos(n);  // 1-based rank of each document
  for (std::size_t r = 0; r < n; ++r) pos[order[r]] = static_cast<int>(r) + 1;

  std::vector<int> ideal(grades.begin(), grades.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  double ideal_dcg = dcg_at_k(ideal, truncation_k);
  if (ideal_dcg <= 0.0) return state;  // no relevant document, nothing to move

  auto discount = [truncation_k](int rank) {
    return rank <= truncation_k
               ? 1.0 / std::log2(static_cast<double>(rank) + 1.0)
               : 0.0;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (grades[i] <= grades[j]) continue;
      double delta = std::abs((std::pow(2.0, grades[i]) - std::pow(2.0, grades[j])) *
                              (discount(pos[i]) - discount(pos[j]))) /
                     ideal_dcg;
      if (delta == 0.0) continue;  // both outside the truncation depth
      double rho = 1.0 / (1.0 + std::exp(scores[i] - scores[j]));
      state.lambdas[i] += rho * delta;
      state.lambdas[j] -= rho * delta;
      double w = rho * (1.0 - rho) * delta;
      state.weights[i] += w;
      state.weights[j] += w;
    }
  }
  return state;
}

namespace {

// Flattened training data: instance-major arrays plus query boundaries.
struct FlatData {
  std::vector<const RankingInstance*> instances;
  std::vector<std::size_t> query_begin;  // size = queries + 1
  std::vector<int> grades;
};

FlatData flatten(const DatasetView& view, Objective objective) {
  FlatData flat;
  flat.query_begin.push_back(0);
  for (std::size_t gi = 0; gi < view.group_count(); ++gi) {
    const QueryGroup& g = view.group(gi);
    for (const RankingInstance& inst : g.instances) {
      if (!inst.labels.has(objective))
        throw DataError("missing " + std::string(objective_name(objective)) +
                        " label for doc " + inst.doc_id);
      flat.instances.push_back(&inst);
      flat.grades.push_back(inst.labels.grade(objective));
    }
    flat.query_begin.push_back(flat.instances.size());
  }
  if (flat.instances.empty()) throw DataError("empty training view");
  return flat;
}

std::vector<std::vector<double>> build_columns(const FlatData& flat,
                                               int feature_count) {
  std::vector<std::vector<double>> columns(
      static_cast<std::size_t>(feature_count),
      std::vector<double>(flat.instances.size()));
  for (std::size_t i = 0; i < flat.instances.size(); ++i) {
    const std::vector<double>& v = flat.instances[i]->features.values;
    for (int f = 0; f < feature_count; ++f)
      columns[static_cast<std::size_t>(f)][i] = v[static_cast<std::size_t>(f)];
  }
  return columns;
}

std::vector<int> sample_features(Rng& rng, int feature_count, double fraction) {
  auto k = static_cast<std::uint32_t>(std::llround(fraction * feature_count));
  if (k < 1) k = 1;
  if (k > static_cast<std::uint32_t>(feature_count))
    k = static_cast<std::uint32_t>(feature_count);
  std::vector<std::uint32_t> picks = rng.sample_without_replacement(
      static_cast<std::uint32_t>(feature_count), k);
  std::vector<int> ids(picks.size());
  for (std::size_t i = 0; i < picks.size(); ++i)
    ids[i] = static_cast<int>(picks[i]) + 1;
  return ids;
}

double training_ndcg(const FlatData& flat, const std::vector<double>& scores,
                     int k) {
  double sum = 0.0;
  std::size_t counted = 0;
  const std::size_t queries = flat.query_begin.size() - 1;
  for (std::size_t q = 0; q < queries; ++q) {
    std::size_t b = flat.query_begin[q], e = flat.query_begin[q + 1];
    std::vector<std::uint32_t> order(e - b);
    std::iota(order.begin(), order.end(), static_cast<std::uint32_t>(b));
    std::stable_sort(order.begin(), order.end(),
                     [&scores](std::uint32_t a, std::uint32_t c) {
                       return scores[a] > scores[c];
                     });
    std::vector<int> ranked(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      ranked[i] = flat.grades[order[i]];
    auto ndcg = ndcg_at_k(ranked, k);
    if (ndcg) {
      sum += *ndcg;
      ++counted;
    }
  }
  return counted ? sum / static_cast<double>(counted) : 0.0;
}

}  // namespace

TreeEnsemble train_lambdamart(const DatasetView& view, Objective objective,
                              const LambdaMartConfig& config) {
  config.validate();
  FlatData flat = flatten(view, objective);
  const std::size_t n = flat.instances.size();
  const std::size_t queries = flat.query_begin.size() - 1;
  const int feature_count = view.registry().feature_count();

  TreeEnsemble ensemble;
  ensemble.mode = TreeEnsemble::Mode::boosted;
  ensemble.learning_rate = config.learning_rate;
  if (config.num_trees == 0) return ensemble;

  TreeTrainer trainer(build_columns(flat, feature_count));
  const int min_instances = std::max(
      1, static_cast<int>(std::ceil(config.min_instance_pct / 100.0 *
                                    static_cast<double>(n))));

  Rng rng(derive_seed(config.seed, "lambdamart"));
  std::vector<double> scores(n, 0.0);
  std::vector<double> lambdas(n), weights(n);
  std::vector<std::uint32_t> sample;

  auto n_queries_per_round = static_cast<std::uint32_t>(
      std::llround(config.sub_sampling * static_cast<double>(queries)));
  if (n_queries_per_round < 1) n_queries_per_round = 1;

  for (int round = 0; round < config.num_trees; ++round) {
    std::vector<std::uint32_t> qs = rng.sample_without_replacement(
        static_cast<std::uint32_t>(queries), n_queries_per_round);
    std::vector<int> features =
        sample_features(rng, feature_count, config.feature_sampling);

    std::fill(lambdas.begin(), lambdas.end(), 0.0);
    std::fill(weights.begin(), weights.end(), 0.0);
    sample.clear();
    for (std::uint32_t q : qs) {
      std::size_t b = flat.query_begin[q], e = flat.query_begin[q + 1];
      for (std::size_t i = b; i < e; ++i)
        sample.push_back(static_cast<std::uint32_t>(i));
    }

#pragma omp parallel for schedule(dynamic)
    for (long long qi = 0; qi < static_cast<long long>(qs.size()); ++qi) {
      std::size_t b = flat.query_begin[qs[static_cast<std::size_t>(qi)]];
      std::size_t e = flat.query_begin[qs[static_cast<std::size_t>(qi)] + 1];
      LambdaState state = compute_lambdas(
          std::span<const int>(flat.grades.data() + b, e - b),
          std::span<const double>(scores.data() + b, e - b),
          config.truncation_k);
      for (std::size_t i = b; i < e; ++i) {
        lambdas[i] = state.lambdas[i - b];
        weights[i] = state.weights[i - b];
      }
    }

    TreeTrainer::FitResult fit =
        trainer.fit(sample, lambdas, weights, features, config.num_leaves,
                    min_instances);
    // One-step Newton leaf values on the documents that reached each leaf.
    for (std::size_t s = 0; s < fit.leaf_nodes.size(); ++s) {
      double sum_l = 0.0, sum_w = 0.0;
      for (std::uint32_t id : fit.leaf_members[s]) {
        sum_l += lambdas[id];
        sum_w += weights[id];
      }
      fit.tree.set_leaf_value(fit.leaf_nodes[s],
                              sum_w > 0.0 ? sum_l / sum_w : 0.0);
    }

#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      scores[static_cast<std::size_t>(i)] +=
          config.learning_rate *
          fit.tree.predict(flat.instances[static_cast<std::size_t>(i)]->features);

    ensemble.trees.push_back(std::move(fit.tree));

    if (config.print_progress && ((round + 1) % 100 == 0 ||
                                  round + 1 == config.num_trees)) {
      std::fprintf(stderr, "round %d training NDCG@%d %.5f\n", round + 1,
                   config.truncation_k,
                   training_ndcg(flat, scores, config.truncation_k));
    }
  }
  return ensemble;
}

RandomForestConfig RandomForestConfig::from_config(const KeyValueConfig& cfg) {
  RandomForestConfig c;
  c.num_trees = static_cast<int>(cfg.get_int("rf.num-trees", c.num_trees));
  c.bag_fraction = cfg.get_double("rf.bag-fraction", c.bag_fraction);
  c.feature_fraction = cfg.get_double("rf.feature-fraction", c.feature_fraction);
  c.num_leaves = static_cast<int>(cfg.get_int("rf.num-leaves", c.num_leaves));
  c.min_instances = static_cast<int>(cfg.get_int("rf.min-instances", c.min_instances));
  c.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  if (c.num_trees < 1) throw ConfigError("rf.num-trees must be >= 1");
  if (c.bag_fraction <= 0.0 || c.bag_fraction > 1.0)
    throw ConfigError("rf.bag-fraction must be in (0,1]");
  if (c.feature_fraction <= 0.0 || c.feature_fraction > 1.0)
    throw ConfigError("rf.feature-fraction must be in (0,1]");
  return c;
}

TreeEnsemble train_random_forest(const DatasetView& view, Objective objective,
                                 const RandomForestConfig& config) {
  FlatData flat = flatten(view, objective);
  const std::size_t queries = flat.query_begin.size() - 1;
  const int feature_count = view.registry().feature_count();
  TreeTrainer trainer(build_columns(flat, feature_count));

  std::vector<double> targets(flat.grades.begin(), flat.grades.end());
  std::vector<double> weights(flat.instances.size(), 1.0);

  auto bag = static_cast<std::uint32_t>(
      std::llround(config.bag_fraction * static_cast<double>(queries)));
  if (bag < 1) bag = 1;

  TreeEnsemble ensemble;
  ensemble.mode = TreeEnsemble::Mode::bagged;
  ensemble.learning_rate = 1.0;
  Rng rng(derive_seed(config.seed, "random-forest"));
  std::vector<std::uint32_t> sample;
  for (int t = 0; t < config.num_trees; ++t) {
    std::vector<std::uint32_t> qs =
        rng.sample_without_replacement(static_cast<std::uint32_t>(queries), bag);
    std::vector<int> features =
        sample_features(rng, feature_count, config.feature_fraction);
    sample.clear();
    for (std::uint32_t q : qs) {
      std::size_t b = flat.query_begin[q], e = flat.query_begin[q + 1];
      for (std::size_t i = b; i < e; ++i)
        sample.push_back(static_cast<std::uint32_t>(i));
    }
    ensemble.trees.push_back(trainer
                                 .fit(sample, targets, weights, features,
                                      config.num_leaves, config.min_instances)
                                 .tree);
  }
  return ensemble;
}

}  // namespace ltr
