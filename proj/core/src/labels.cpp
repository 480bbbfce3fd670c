#include "ltr/labels.hpp"

#include <cmath>
#include <functional>

#include "ltr/error.hpp"

namespace ltr {

EngagementRates compute_rates(const EngagementRecord& r) {
  validate_nonnegative(r);
  if (r.impressions == 0)
    throw DataError("compute_rates: zero impressions for query=" + r.query_id +
                    " doc=" + r.doc_id);
  EngagementRates rates;
  double imp = static_cast<double>(r.impressions);
  rates.ctr = static_cast<double>(r.clicks) / imp;
  rates.order_rate = static_cast<double>(r.orders) / imp;
  rates.revenue_rate = r.revenue / imp;
  rates.atcr = r.clicks == 0
                   ? 0.0
                   : static_cast<double>(r.atc) / static_cast<double>(r.clicks);
  return rates;
}

std::size_t FilteredQueryPool::record_count() const {
  std::size_t n = 0;
  for (const Query& q : queries) n += q.records.size();
  return n;
}

FilteredQueryPool filter_low_impressions(
    const std::vector<EngagementRecord>& records, long long threshold) {
  FilteredQueryPool pool;
  std::map<std::string, std::size_t> index;
  for (const EngagementRecord& r : records) {
    if (r.impressions < threshold) continue;
    auto [it, fresh] = index.emplace(r.query_id, pool.queries.size());
    if (fresh) {
      FilteredQueryPool::Query q;
      q.query_id = r.query_id;
      pool.queries.push_back(std::move(q));
    }
    pool.queries[it->second].records.push_back(r);
  }
  return pool;
}

std::vector<int> discretize_labels(const std::vector<double>& rates) {
  std::vector<int> grades(rates.size(), 0);
  double max_rate = 0.0;
  for (double r : rates) {
    if (r < 0.0) throw DataError("negative rate");
    if (r > max_rate) max_rate = r;
  }
  if (max_rate == 0.0) return grades;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    double q = 4.0 * rates[i] / max_rate;
    double nearest = std::round(q);
    // Snap ratios that are integers up to float noise, so a rate equal to a
    // bucket boundary lands in that bucket instead of the one above.
    double g = std::abs(q - nearest) <= 1e-12 ? nearest : std::ceil(q);
    grades[i] = static_cast<int>(g);
  }
  return grades;
}

RankingDataset build_labeled_dataset(
    const FilteredQueryPool& pool,
    const std::function<const FeatureVector*(const std::string&,
                                             const std::string&)>& lookup,
    const FeatureRegistry& registry) {
  std::vector<QueryGroup> groups;
  groups.reserve(pool.queries.size());
  for (const FilteredQueryPool::Query& q : pool.queries) {
    QueryGroup group;
    group.query_id = q.query_id;
    group.instances.reserve(q.records.size());

    std::array<std::vector<double>, 4> rate_lists;
    for (const EngagementRecord& r : q.records) {
      EngagementRates rates = compute_rates(r);
      for (Objective o : kAllObjectives)
        rate_lists[static_cast<int>(o)].push_back(rates.rate(o));
    }
    std::array<std::vector<int>, 4> grade_lists;
    for (Objective o : kAllObjectives)
      grade_lists[static_cast<int>(o)] =
          discretize_labels(rate_lists[static_cast<int>(o)]);

    for (std::size_t i = 0; i < q.records.size(); ++i) {
      const EngagementRecord& r = q.records[i];
      const FeatureVector* fv = lookup(r.query_id, r.doc_id);
      if (!fv)
        throw DataError("no feature vector for query=" + r.query_id +
                        " doc=" + r.doc_id);
      RankingInstance inst;
      inst.query_id = r.query_id;
      inst.doc_id = r.doc_id;
      inst.features = *fv;
      for (Objective o : kAllObjectives)
        inst.labels.set(o, grade_lists[static_cast<int>(o)][i]);
      group.instances.push_back(std::move(inst));
    }
    groups.push_back(std::move(group));
  }
  return RankingDataset(registry, std::move(groups));
}

RankingDataset build_labeled_dataset(
    const FilteredQueryPool& pool,
    const std::map<std::pair<std::string, std::string>, FeatureVector>& features,
    const FeatureRegistry& registry) {
  return build_labeled_dataset(
      pool,
      [&features](const std::string& q,
                  const std::string& d) -> const FeatureVector* {
        auto it = features.find({q, d});
        return it == features.end() ? nullptr : &it->second;
      },
      registry);
}

}  // namespace ltr
