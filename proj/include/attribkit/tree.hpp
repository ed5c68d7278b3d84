// Copyright 2026 The attribkit Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "attribkit/common.hpp"
#include "attribkit/features.hpp"

namespace attribkit {

/// One node of a flat tree table. Internal nodes send rows with
/// value <= threshold to `left`. Leaves carry the index of their payload.
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t leaf = 0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Index of the leaf node reached by `row`, starting at node 0.
std::size_t descend(const std::vector<TreeNode>& nodes, const SparseVector& row);

/// CART classification tree; leaves store (bootstrap-weighted) class counts.
struct ClassificationTree {
  std::vector<TreeNode> nodes;
  std::vector<std::uint32_t> leaf_counts;  // n_classes entries per leaf
  int n_classes = 0;

  std::span<const std::uint32_t> counts_at(std::size_t node) const {
    return {leaf_counts.data() + static_cast<std::size_t>(nodes[node].leaf) * static_cast<std::size_t>(n_classes),
            static_cast<std::size_t>(n_classes)};
  }
  /// Class distribution of the leaf reached by `row`, added into `out` (size n_classes).
  void accumulate_distribution(const SparseVector& row, std::span<double> out) const;
  std::size_t n_leaves() const { return n_classes == 0 ? 0 : leaf_counts.size() / static_cast<std::size_t>(n_classes); }

  bool operator==(const ClassificationTree&) const = default;
};

/// Second-order boosting tree; leaves store -G / (H + lambda).
struct RegressionTree {
  std::vector<TreeNode> nodes;
  std::vector<double> leaf_values;

  double predict(const SparseVector& row) const { return leaf_values[nodes[descend(nodes, row)].leaf]; }
  bool operator==(const RegressionTree&) const = default;
};

/// Column-major copy of a row set, shared by every tree grown on it.
class ColumnIndex {
 public:
  struct Entry {
    std::uint32_t row;
    double value;
  };
  ColumnIndex(std::span<const SparseVector> rows, std::uint32_t dimension);
  std::span<const Entry> column(std::uint32_t feature) const {
    return {entries_.data() + offsets_[feature], offsets_[feature + 1] - offsets_[feature]};
  }
  std::uint32_t dimension() const { return dimension_; }

 private:
  std::vector<Entry> entries_;
  std::vector<std::size_t> offsets_;
  std::uint32_t dimension_;
};

struct TreeParams {
  std::optional<std::size_t> max_depth;  // unbounded when empty
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  std::size_t features_per_split = 0;  // 0: every feature
};

struct WeightedSample {
  std::uint32_t row;
  std::uint32_t weight;
};

/// Greedy Gini CART. At each node a random subset of `features_per_split`
/// non-constant features is searched; thresholds are midpoints between
/// consecutive distinct values (zeros of the sparse rows included). Splits are
/// compared exactly in integer arithmetic; ties go to the lower feature index,
/// then the lower threshold.
ClassificationTree train_tree(std::span<const SparseVector> rows, std::span<const int> labels, int n_classes,
                              const TreeParams& params, Rng& rng);

/// Same, over an explicit weighted sample (bootstrap multiplicities) and a prebuilt column index.
ClassificationTree train_tree(std::span<const SparseVector> rows, std::span<const int> labels, int n_classes,
                              const ColumnIndex& columns, std::vector<WeightedSample> samples,
                              const TreeParams& params, Rng& rng);

struct BoostTreeParams {
  std::size_t max_depth = 4;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
};

/// Exact greedy second-order tree over all features. A split is kept only if
/// 0.5 * [GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)] - gamma > 0.
RegressionTree train_boost_tree(std::span<const SparseVector> rows, const ColumnIndex& columns,
                                std::span<const double> grad, std::span<const double> hess,
                                const BoostTreeParams& params);

}  // namespace attribkit
