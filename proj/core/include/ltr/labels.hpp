#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ltr/dataset.hpp"

namespace ltr {

// Per-record engagement rates. atcr is conditioned on clicks and defined as 0
// when there are no clicks; the other three are per impression.
struct EngagementRates {
  double ctr = 0.0;
  double atcr = 0.0;
  double order_rate = 0.0;
  double revenue_rate = 0.0;

  double rate(Objective o) const {
    switch (o) {
      case Objective::click_rate: return ctr;
      case Objective::atc_ratio: return atcr;
      case Objective::order_rate: return order_rate;
      case Objective::revenue_rate: return revenue_rate;
    }
    return 0.0;
  }
};

// Throws DataError when impressions == 0.
EngagementRates compute_rates(const EngagementRecord& r);

// Records that survived the impression filter, grouped by query in first
// appearance order. Queries whose documents all fell below the threshold are
// dropped entirely.
struct FilteredQueryPool {
  struct Query {
    std::string query_id;
    std::vector<EngagementRecord> records;
  };
  std::vector<Query> queries;

  std::size_t record_count() const;
};

FilteredQueryPool filter_low_impressions(
    const std::vector<EngagementRecord>& records, long long threshold = 100);

// Grade = ceil(4 * rate / max_rate) over the query's documents. A zero max
// rate yields all-zero grades. Ratios within 1e-12 of an integer are snapped
// to that integer before the ceiling so boundary rates do not overshoot.
std::vector<int> discretize_labels(const std::vector<double>& rates);

// Assembles the four-objective dataset. Every retained (query, doc) pair must
// have a feature vector; a missing one is an error.
RankingDataset build_labeled_dataset(
    const FilteredQueryPool& pool,
    const std::map<std::pair<std::string, std::string>, FeatureVector>& features,
    const FeatureRegistry& registry);

// Attaches grades to an existing pool given a lookup callback; shared by the
// in-memory overload above and the streaming CLI path.
RankingDataset build_labeled_dataset(
    const FilteredQueryPool& pool,
    const std::function<const FeatureVector*(const std::string&,
                                             const std::string&)>& lookup,
    const FeatureRegistry& registry);

}  // namespace ltr
