#include "ltr/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ltr/error.hpp"

namespace ltr {

int RegressionTree::leaf_index(const FeatureVector& fv) const {
  if (nodes_.empty()) throw DataError("predict on empty tree");
  int idx = 0;
  while (!nodes_[static_cast<std::size_t>(idx)].is_leaf()) {
    const TreeNode& n = nodes_[static_cast<std::size_t>(idx)];
    idx = fv.at(n.feature) <= n.threshold ? n.left : n.right;
  }
  return idx;
}

int RegressionTree::leaf_count() const {
  int c = 0;
  for (const TreeNode& n : nodes_)
    if (n.is_leaf()) ++c;
  return c;
}

void RegressionTree::set_leaf_value(int node_index, double value) {
  TreeNode& n = nodes_[static_cast<std::size_t>(node_index)];
  if (!n.is_leaf()) throw DataError("set_leaf_value on internal node");
  n.value = value;
}

TreeTrainer::TreeTrainer(std::vector<std::vector<double>> columns)
    : columns_(std::move(columns)) {
  const std::size_t n = instance_count();
  for (const auto& col : columns_)
    if (col.size() != n) throw DataError("ragged column matrix");
  sorted_.resize(columns_.size());
#pragma omp parallel for schedule(dynamic)
  for (long long f = 0; f < static_cast<long long>(columns_.size()); ++f) {
    auto& order = sorted_[static_cast<std::size_t>(f)];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    const std::vector<double>& col = columns_[static_cast<std::size_t>(f)];
    std::sort(order.begin(), order.end(),
              [&col](std::uint32_t a, std::uint32_t b) {
                return col[a] != col[b] ? col[a] < col[b] : a < b;
              });
  }
}

namespace {

struct SplitChoice {
  double gain = 0.0;
  int feature = 0;       // 1-based; 0 = none found
  double threshold = 0.0;
};

// Candidate threshold between two adjacent distinct values. Guards against
// the midpoint rounding up to the higher value, which would route it left.
double split_threshold(double lo, double hi) {
  double mid = lo + (hi - lo) / 2.0;
  return mid >= hi ? lo : mid;
}

struct LeafStats {
  double sum_w = 0.0;
  double sum_wt = 0.0;
  std::uint32_t count = 0;
};

}  // namespace

TreeTrainer::FitResult TreeTrainer::fit(std::span<const std::uint32_t> sample,
                                        std::span<const double> targets,
                                        std::span<const double> weights,
                                        std::span<const int> feature_ids,
                                        int num_leaves,
                                        int min_instances) const {
  if (sample.empty()) throw DataError("fit on empty sample");
  if (num_leaves < 1) throw DataError("num_leaves must be >= 1");
  if (min_instances < 1) min_instances = 1;
  const std::size_t n_all = instance_count();

  // Leaf assignment per instance; -1 = not in sample. Node indices double as
  // leaf ids.
  std::vector<int> leaf_of(n_all, -1);
  for (std::uint32_t id : sample) leaf_of[id] = 0;

  // Sorted orders restricted to the sample, one per candidate feature.
  std::vector<std::vector<std::uint32_t>> local(feature_ids.size());
#pragma omp parallel for schedule(dynamic)
  for (long long fi = 0; fi < static_cast<long long>(feature_ids.size()); ++fi) {
    const auto& full = sorted_[static_cast<std::size_t>(feature_ids[fi] - 1)];
    auto& out = local[static_cast<std::size_t>(fi)];
    out.reserve(sample.size());
    for (std::uint32_t id : full)
      if (leaf_of[id] >= 0) out.push_back(id);
  }

  std::vector<TreeNode> nodes(1);
  std::vector<LeafStats> stats(1);
  {
    LeafStats& s = stats[0];
    for (std::uint32_t id : sample) {
      s.sum_w += weights[id];
      s.sum_wt += weights[id] * targets[id];
      ++s.count;
    }
    nodes[0].value = s.sum_w > 0.0 ? s.sum_wt / s.sum_w : 0.0;
  }

  // Best split for one leaf: scan every candidate feature's sample order,
  // accumulating prefix sums over the leaf's members only.
  auto best_split_for = [&](int leaf) {
    const LeafStats& total = stats[static_cast<std::size_t>(leaf)];
    // Rounding in the prefix sums can make a constant-target leaf look like
    // it has a hair of gain; anything below this is treated as zero.
    const double min_gain =
        total.sum_w > 0.0
            ? 1e-12 * (total.sum_wt * total.sum_wt / total.sum_w)
            : 0.0;
    std::vector<SplitChoice> per_feature(feature_ids.size());
#pragma omp parallel for schedule(dynamic)
    for (long long fi = 0; fi < static_cast<long long>(feature_ids.size());
         ++fi) {
      const int fid = feature_ids[fi];
      const std::vector<double>& col = columns_[static_cast<std::size_t>(fid - 1)];
      SplitChoice best;
      double w_left = 0.0, wt_left = 0.0;
      std::uint32_t c_left = 0;
      double prev_value = 0.0;
      bool have_prev = false;
      for (std::uint32_t id : local[static_cast<std::size_t>(fi)]) {
        if (leaf_of[id] != leaf) continue;
        double v = col[id];
        if (have_prev && v != prev_value) {
          std::uint32_t c_right = total.count - c_left;
          if (c_left >= static_cast<std::uint32_t>(min_instances) &&
              c_right >= static_cast<std::uint32_t>(min_instances)) {
            double w_right = total.sum_w - w_left;
            double wt_right = total.sum_wt - wt_left;
            double gain = 0.0;
            if (w_left > 0.0) gain += wt_left * wt_left / w_left;
            if (w_right > 0.0) gain += wt_right * wt_right / w_right;
            if (total.sum_w > 0.0)
              gain -= total.sum_wt * total.sum_wt / total.sum_w;
            if (gain > min_gain && gain > best.gain) {
              best.gain = gain;
              best.feature = fid;
              best.threshold = split_threshold(prev_value, v);
            }
          }
        }
        w_left += weights[id];
        wt_left += weights[id] * targets[id];
        ++c_left;
        prev_value = v;
        have_prev = true;
      }
      per_feature[static_cast<std::size_t>(fi)] = best;
    }
    // Deterministic argmax: ascending feature order, strictly greater gain
    // wins, so ties resolve to the lowest feature id / lowest threshold.
    SplitChoice best;
    for (const SplitChoice& c : per_feature)
      if (c.feature != 0 && c.gain > best.gain) best = c;
    return best;
  };

  std::vector<int> active = {0};
  std::vector<SplitChoice> candidate(1);
  candidate[0] = static_cast<std::size_t>(sample.size()) >=
                         2 * static_cast<std::size_t>(min_instances)
                     ? best_split_for(0)
                     : SplitChoice{};

  int leaf_total = 1;
  while (leaf_total < num_leaves) {
    int pick = -1;
    for (int leaf : active) {
      const SplitChoice& c = candidate[static_cast<std::size_t>(leaf)];
      if (c.feature == 0 || c.gain <= 0.0) continue;
      if (pick < 0 || c.gain > candidate[static_cast<std::size_t>(pick)].gain)
        pick = leaf;
    }
    if (pick < 0) break;

    const SplitChoice chosen = candidate[static_cast<std::size_t>(pick)];
    int left_id = static_cast<int>(nodes.size());
    int right_id = left_id + 1;
    nodes[static_cast<std::size_t>(pick)].feature = chosen.feature;
    nodes[static_cast<std::size_t>(pick)].threshold = chosen.threshold;
    nodes[static_cast<std::size_t>(pick)].left = left_id;
    nodes[static_cast<std::size_t>(pick)].right = right_id;
    nodes.emplace_back();
    nodes.emplace_back();
    stats.emplace_back();
    stats.emplace_back();
    candidate.emplace_back();
    candidate.emplace_back();

    const std::vector<double>& col =
        columns_[static_cast<std::size_t>(chosen.feature - 1)];
    LeafStats ls, rs;
    for (std::uint32_t id : sample) {
      if (leaf_of[id] != pick) continue;
      LeafStats& side = col[id] <= chosen.threshold ? ls : rs;
      leaf_of[id] = col[id] <= chosen.threshold ? left_id : right_id;
      side.sum_w += weights[id];
      side.sum_wt += weights[id] * targets[id];
      ++side.count;
    }
    stats[static_cast<std::size_t>(left_id)] = ls;
    stats[static_cast<std::size_t>(right_id)] = rs;
    nodes[static_cast<std::size_t>(left_id)].value =
        ls.sum_w > 0.0 ? ls.sum_wt / ls.sum_w : 0.0;
    nodes[static_cast<std::size_t>(right_id)].value =
        rs.sum_w > 0.0 ? rs.sum_wt / rs.sum_w : 0.0;

    active.erase(std::find(active.begin(), active.end(), pick));
    active.push_back(left_id);
    active.push_back(right_id);
    ++leaf_total;
    if (leaf_total >= num_leaves) break;
    candidate[static_cast<std::size_t>(left_id)] =
        ls.count >= 2 * static_cast<std::uint32_t>(min_instances)
            ? best_split_for(left_id)
            : SplitChoice{};
    candidate[static_cast<std::size_t>(right_id)] =
        rs.count >= 2 * static_cast<std::uint32_t>(min_instances)
            ? best_split_for(right_id)
            : SplitChoice{};
  }

  FitResult result;
  result.tree = RegressionTree(std::move(nodes));
  for (int i = 0; i < static_cast<int>(result.tree.nodes().size()); ++i)
    if (result.tree.nodes()[static_cast<std::size_t>(i)].is_leaf())
      result.leaf_nodes.push_back(i);
  result.leaf_members.resize(result.leaf_nodes.size());
  std::vector<int> slot_of(result.tree.nodes().size(), -1);
  for (std::size_t s = 0; s < result.leaf_nodes.size(); ++s)
    slot_of[static_cast<std::size_t>(result.leaf_nodes[s])] =
        static_cast<int>(s);
  for (std::uint32_t id : sample)
    result.leaf_members[static_cast<std::size_t>(slot_of[static_cast<std::size_t>(
                            leaf_of[id])])]
        .push_back(id);
  return result;
}

RegressionTree fit_regression_tree(const std::vector<FeatureVector>& rows,
                                   std::span<const double> targets,
                                   std::span<const double> weights,
                                   int num_leaves, int min_instances,
                                   std::span<const int> feature_ids) {
  if (rows.empty()) throw DataError("fit on empty sample");
  if (targets.size() != rows.size())
    throw DataError("targets length mismatch");
  const int nf = rows[0].size();
  std::vector<std::vector<double>> columns(
      static_cast<std::size_t>(nf),
      std::vector<double>(rows.size(), 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != nf) throw DataError("ragged feature rows");
    for (int f = 1; f <= nf; ++f)
      columns[static_cast<std::size_t>(f - 1)][i] = rows[i].at(f);
  }
  TreeTrainer trainer(std::move(columns));

  std::vector<std::uint32_t> sample(rows.size());
  std::iota(sample.begin(), sample.end(), 0u);
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(rows.size(), 1.0);
  if (w.size() != rows.size()) throw DataError("weights length mismatch");

  std::vector<int> all_features;
  if (feature_ids.empty()) {
    all_features.resize(static_cast<std::size_t>(nf));
    std::iota(all_features.begin(), all_features.end(), 1);
    feature_ids = all_features;
  }
  return trainer.fit(sample, targets, w, feature_ids, num_leaves,
                     min_instances)
      .tree;
}

}  // namespace ltr
