#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ltr/dataset.hpp"

namespace ltr {

struct TreeNode {
  int feature = -1;  // 1-based split feature; -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // taken when value <= threshold
  int right = -1;
  double value = 0.0;  // leaf output

  bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes)
      : nodes_(std::move(nodes)) {}

  double predict(const FeatureVector& fv) const {
    return nodes_[static_cast<std::size_t>(leaf_index(fv))].value;
  }
  int leaf_index(const FeatureVector& fv) const;

  int leaf_count() const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  void set_leaf_value(int node_index, double value);
  bool empty() const { return nodes_.empty(); }

 private:
  std::vector<TreeNode> nodes_;
};

// Fits least-squares regression trees over a fixed instance universe.
// Columns are presorted once at construction so repeated fits (boosting
// rounds) only pay linear scans.
class TreeTrainer {
 public:
  // columns[f][i] = value of feature id f+1 on instance i.
  explicit TreeTrainer(std::vector<std::vector<double>> columns);

  struct FitResult {
    RegressionTree tree;
    // Node index of every leaf, and the training instances routed to it.
    std::vector<int> leaf_nodes;
    std::vector<std::vector<std::uint32_t>> leaf_members;
  };

  // Best-first growth: repeatedly expands the leaf whose best split yields
  // the largest weighted variance reduction, until num_leaves is reached or
  // no split with positive gain and min_instances per side exists.
  // `sample` lists the instance ids to fit on (ascending); `targets` and
  // `weights` are indexed by instance id.
  FitResult fit(std::span<const std::uint32_t> sample,
                std::span<const double> targets,
                std::span<const double> weights,
                std::span<const int> feature_ids, int num_leaves,
                int min_instances) const;

  int feature_count() const { return static_cast<int>(columns_.size()); }
  std::size_t instance_count() const {
    return columns_.empty() ? 0 : columns_[0].size();
  }
  const std::vector<double>& column(int fid) const {
    return columns_[static_cast<std::size_t>(fid - 1)];
  }

 private:
  std::vector<std::vector<double>> columns_;
  // Per feature: instance ids ascending by value, ties by id.
  std::vector<std::vector<std::uint32_t>> sorted_;
};

// One-off convenience over TreeTrainer. Rows are the instances in order;
// weights may be empty for uniform weighting; feature_ids empty means all.
RegressionTree fit_regression_tree(const std::vector<FeatureVector>& rows,
                                   std::span<const double> targets,
                                   std::span<const double> weights,
                                   int num_leaves, int min_instances,
                                   std::span<const int> feature_ids = {});

}  // namespace ltr
