#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ltr/dataset.hpp"

namespace ltr {

// Gain 2^grade - 1, discount log2(rank+1), truncated at k.
double dcg_at_k(std::span<const int> grades, int k);

// nullopt marks a query with zero ideal DCG (all grades 0); such queries are
// skipped by the aggregates rather than scored 0 or 1.
std::optional<double> ndcg_at_k(std::span<const int> grades, int k);

using ScoreFn = std::function<double(const FeatureVector&)>;

struct QueryNdcg {
  std::string query_id;
  std::optional<double> ndcg;
};

// Documents are ranked by descending score, ties broken by ascending doc_id.
std::vector<QueryNdcg> per_query_ndcg(const ScoreFn& scorer,
                                      const DatasetView& view,
                                      Objective objective, int k = 10);

// Mean over non-skipped queries; throws DataError when every query is
// skipped or the view is empty.
double mean_ndcg(const ScoreFn& scorer, const DatasetView& view,
                 Objective objective, int k = 10);
double mean_ndcg(const std::vector<QueryNdcg>& per_query);

struct SignificanceResult {
  double statistic = 0.0;  // T+ - T-, signed rank sum
  double p_value = 1.0;    // two-sided
  bool significant = false;
  int n = 0;  // pairs remaining after zero differences are dropped
};

// Wilcoxon signed-rank test on paired samples (a_i, b_i). Zero differences
// are dropped; tied absolute differences get average ranks. Exact two-sided
// p by full sign enumeration for n <= 20, normal approximation with
// continuity and tie corrections beyond.
SignificanceResult wilcoxon_signed_rank(
    const std::vector<std::pair<double, double>>& paired, double level = 0.05);

// H(grade) - H(grade | binned feature) in bits, with equal-frequency bins
// (duplicate boundaries merged). Throws DataError on length mismatch.
double info_gain(std::span<const double> feature_values,
                 std::span<const int> grades, int bins = 10);

double entropy_bits(std::span<const int> values);

}  // namespace ltr
