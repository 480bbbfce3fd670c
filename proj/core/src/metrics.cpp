#include "ltr/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include "ltr/error.hpp"

namespace ltr {

namespace {

double gain_of(int grade) { return std::pow(2.0, grade) - 1.0; }

}  // namespace

double dcg_at_k(std::span<const int> grades, int k) {
  if (k < 0) throw DataError("dcg_at_k: negative k");
  std::size_t depth = std::min<std::size_t>(grades.size(),
                                            static_cast<std::size_t>(k));
  double dcg = 0.0;
  for (std::size_t i = 0; i < depth; ++i)
    dcg += gain_of(grades[i]) / std::log2(static_cast<double>(i) + 2.0);
  return dcg;
}

std::optional<double> ndcg_at_k(std::span<const int> grades, int k) {
  std::vector<int> ideal(grades.begin(), grades.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  double idcg = dcg_at_k(ideal, k);
  if (idcg <= 0.0) return std::nullopt;
  return dcg_at_k(grades, k) / idcg;
}

std::vector<QueryNdcg> per_query_ndcg(const ScoreFn& scorer,
                                      const DatasetView& view,
                                      Objective objective, int k) {
  std::vector<QueryNdcg> out(view.group_count());
  for (std::size_t gi = 0; gi < view.group_count(); ++gi) {
    const QueryGroup& g = view.group(gi);
    std::vector<std::pair<double, std::size_t>> order(g.instances.size());
    for (std::size_t i = 0; i < g.instances.size(); ++i)
      order[i] = {scorer(g.instances[i].features), i};
    std::sort(order.begin(), order.end(),
              [&g](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return g.instances[a.second].doc_id <
                       g.instances[b.second].doc_id;
              });
    std::vector<int> grades(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const RankingInstance& inst = g.instances[order[i].second];
      if (!inst.labels.has(objective))
        throw DataError("missing " + std::string(objective_name(objective)) +
                        " label for doc " + inst.doc_id);
      grades[i] = inst.labels.grade(objective);
    }
    out[gi].query_id = g.query_id;
    out[gi].ndcg = ndcg_at_k(grades, k);
  }
  return out;
}

double mean_ndcg(const std::vector<QueryNdcg>& per_query) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const QueryNdcg& q : per_query) {
    if (q.ndcg) {
      sum += *q.ndcg;
      ++n;
    }
  }
  if (n == 0)
    throw DataError("mean_ndcg: no query with a positive ideal DCG");
  return sum / static_cast<double>(n);
}

double mean_ndcg(const ScoreFn& scorer, const DatasetView& view,
                 Objective objective, int k) {
  return mean_ndcg(per_query_ndcg(scorer, view, objective, k));
}

namespace {

double normal_sf(double z) {  // P(Z > z)
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace

SignificanceResult wilcoxon_signed_rank(
    const std::vector<std::pair<double, double>>& paired, double level) {
  SignificanceResult res;
  std::vector<double> diffs;
  diffs.reserve(paired.size());
  for (const auto& [a, b] : paired) {
    double d = a - b;
    if (d != 0.0) diffs.push_back(d);
  }
  const int n = static_cast<int>(diffs.size());
  res.n = n;
  if (n == 0) {
    res.statistic = 0.0;
    res.p_value = 1.0;
    res.significant = false;
    return res;
  }

  // Rank |d| ascending with average ranks for ties.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&diffs](int a, int b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });
  std::vector<double> rank(n, 0.0);
  std::vector<double> tie_sizes;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && std::abs(diffs[idx[j]]) == std::abs(diffs[idx[i]])) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
    for (int t = i; t < j; ++t) rank[idx[t]] = avg;
    tie_sizes.push_back(static_cast<double>(j - i));
    i = j;
  }

  double t_plus = 0.0, t_minus = 0.0;
  for (int i = 0; i < n; ++i) {
    if (diffs[i] > 0.0)
      t_plus += rank[i];
    else
      t_minus += rank[i];
  }
  res.statistic = t_plus - t_minus;

  if (n <= 20) {
    // Exact two-sided p: enumerate all sign assignments of the fixed ranks.
    const std::uint64_t total = 1ULL << n;
    std::uint64_t le = 0, ge = 0;
    std::vector<double> r(rank.begin(), rank.end());
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double t = 0.0;
      std::uint64_t m = mask;
      while (m) {
        t += r[std::countr_zero(m)];
        m &= m - 1;
      }
      if (t <= t_plus) ++le;
      if (t >= t_plus) ++ge;
    }
    double p_le = static_cast<double>(le) / static_cast<double>(total);
    double p_ge = static_cast<double>(ge) / static_cast<double>(total);
    res.p_value = std::min(1.0, 2.0 * std::min(p_le, p_ge));
  } else {
    double nn = static_cast<double>(n);
    double mean = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    for (double t : tie_sizes) var -= (t * t * t - t) / 48.0;
    double sd = std::sqrt(var);
    double delta = t_plus - mean;
    double z;
    if (delta > 0.0)
      z = (delta - 0.5) / sd;
    else if (delta < 0.0)
      z = (delta + 0.5) / sd;
    else
      z = 0.0;
    res.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
  }
  res.significant = res.p_value <= level;
  return res;
}

double entropy_bits(std::span<const int> values) {
  std::map<int, std::size_t> counts;
  for (int v : values) ++counts[v];
  double n = static_cast<double>(values.size());
  double h = 0.0;
  for (const auto& [v, c] : counts) {
    double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double info_gain(std::span<const double> feature_values,
                 std::span<const int> grades, int bins) {
  if (feature_values.size() != grades.size())
    throw DataError("info_gain: length mismatch");
  if (feature_values.empty()) throw DataError("info_gain: empty input");
  if (bins < 1) throw DataError("info_gain: bins must be positive");

  const std::size_t n = feature_values.size();
  std::vector<double> sorted(feature_values.begin(), feature_values.end());
  std::sort(sorted.begin(), sorted.end());

  // Equal-frequency boundaries at the quantiles; duplicates merge so constant
  // stretches do not produce empty bins.
  std::vector<double> bounds;
  for (int b = 1; b < bins; ++b) {
    std::size_t pos = (n * static_cast<std::size_t>(b)) / static_cast<std::size_t>(bins);
    if (pos >= n) pos = n - 1;
    double v = sorted[pos];
    if (bounds.empty() || v > bounds.back()) bounds.push_back(v);
  }

  auto bin_of = [&bounds](double x) {
    // Number of boundaries strictly below x; values equal to a boundary stay
    // in the bin the boundary closes.
    return static_cast<int>(std::lower_bound(bounds.begin(), bounds.end(), x) -
                            bounds.begin());
  };

  std::map<int, std::vector<int>> per_bin;
  for (std::size_t i = 0; i < n; ++i)
    per_bin[bin_of(feature_values[i])].push_back(grades[i]);

  double h = entropy_bits(grades);
  double cond = 0.0;
  for (const auto& [bin, gs] : per_bin) {
    double w = static_cast<double>(gs.size()) / static_cast<double>(n);
    cond += w * entropy_bits(gs);
  }
  double gain = h - cond;
  return gain < 0.0 ? 0.0 : gain;
}

}  // namespace ltr
