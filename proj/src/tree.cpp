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

#include "attribkit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace attribkit {

std::size_t descend(const std::vector<TreeNode>& nodes, const SparseVector& row) {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(row.at(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left : n.right);
  }
  return i;
}

void ClassificationTree::accumulate_distribution(const SparseVector& row, std::span<double> out) const {
  const auto counts = counts_at(descend(nodes, row));
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return;
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t k = 0; k < counts.size(); ++k) out[k] += static_cast<double>(counts[k]) * inv;
}

ColumnIndex::ColumnIndex(std::span<const SparseVector> rows, std::uint32_t dimension) : dimension_(dimension) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(dimension) + 1, 0);
  for (const auto& r : rows) {
    if (r.dimension != dimension) fail(ErrorKind::Validation, "row dimension does not match the training dimension");
    for (auto idx : r.indices) ++counts[idx + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  offsets_ = counts;
  entries_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < rows[r].nnz(); ++j)
      entries_[cursor[rows[r].indices[j]]++] = {static_cast<std::uint32_t>(r), rows[r].values[j]};
}

namespace {

double midpoint(double a, double b) {
  double t = (a + b) * 0.5;
  if (t >= b) t = a;
  return t;
}

using u128 = unsigned __int128;

/// Sum of squared child class counts over child weight, kept as a fraction so
/// candidate splits compare exactly.
struct GiniScore {
  u128 num = 0;
  u128 den = 0;
  long double approx = 0.0L;
  bool exact = true;

  bool better_than(const GiniScore& o) const {
    if (o.den == 0) return true;
    if (exact && o.exact) return num * o.den > o.num * den;
    return approx > o.approx;
  }
};

constexpr std::uint64_t kExactWeightLimit = 1ULL << 20;

GiniScore gini_score(std::span<const std::uint64_t> left, std::span<const std::uint64_t> total, std::uint64_t w_left,
                     std::uint64_t w_total) {
  const std::uint64_t w_right = w_total - w_left;
  u128 a = 0, b = 0;
  for (std::size_t k = 0; k < total.size(); ++k) {
    const u128 l = left[k];
    const u128 r = total[k] - left[k];
    a += l * l;
    b += r * r;
  }
  GiniScore s;
  s.num = a * w_right + b * w_left;
  s.den = static_cast<u128>(w_left) * w_right;
  s.exact = w_total < kExactWeightLimit;
  s.approx = static_cast<long double>(a) / w_left + static_cast<long double>(b) / w_right;
  return s;
}

struct Split {
  std::uint32_t feature = 0;
  double threshold = 0.0;
};

class GiniTreeBuilder {
 public:
  GiniTreeBuilder(std::span<const SparseVector> rows, std::span<const int> labels, int n_classes,
                  const ColumnIndex& columns, const TreeParams& params, Rng& rng)
      : rows_(rows),
        labels_(labels),
        k_(static_cast<std::size_t>(n_classes)),
        columns_(columns),
        params_(params),
        rng_(rng),
        node_weight_(rows.size(), 0),
        feat_stamp_(columns.dimension(), 0),
        feat_wnz_(columns.dimension(), 0) {
    tree_.n_classes = n_classes;
  }

  ClassificationTree build(std::vector<WeightedSample> samples) {
    samples_ = std::move(samples);
    grow(0, samples_.size(), 0);
    return std::move(tree_);
  }

 private:
  std::int32_t make_leaf(const std::vector<std::uint64_t>& counts) {
    TreeNode node;
    node.leaf = static_cast<std::uint32_t>(tree_.n_leaves());
    for (auto c : counts) tree_.leaf_counts.push_back(static_cast<std::uint32_t>(c));
    tree_.nodes.push_back(node);
    return static_cast<std::int32_t>(tree_.nodes.size() - 1);
  }

  std::int32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
    std::vector<std::uint64_t> counts(k_, 0);
    std::uint64_t weight = 0;
    for (std::size_t i = begin; i < end; ++i) {
      counts[static_cast<std::size_t>(labels_[samples_[i].row])] += samples_[i].weight;
      weight += samples_[i].weight;
    }
    const auto occupied = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    const bool depth_reached = params_.max_depth && depth >= *params_.max_depth;
    if (occupied <= 1 || depth_reached || weight < params_.min_samples_split ||
        weight < 2 * params_.min_samples_leaf)
      return make_leaf(counts);

    const auto split = find_split(begin, end, counts, weight);
    if (!split) return make_leaf(counts);

    auto mid = std::stable_partition(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                                     samples_.begin() + static_cast<std::ptrdiff_t>(end), [&](const WeightedSample& s) {
                                       return rows_[s.row].at(split->feature) <= split->threshold;
                                     });
    const auto split_at = static_cast<std::size_t>(mid - samples_.begin());

    const auto self = static_cast<std::int32_t>(tree_.nodes.size());
    TreeNode node;
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    tree_.nodes.push_back(node);
    const auto left = grow(begin, split_at, depth + 1);
    const auto right = grow(split_at, end, depth + 1);
    tree_.nodes[static_cast<std::size_t>(self)].left = left;
    tree_.nodes[static_cast<std::size_t>(self)].right = right;
    return self;
  }

  struct Gathered {
    double value;
    int label;
    std::uint32_t weight;
  };

  void gather(std::uint32_t feature, std::vector<Gathered>& out) const {
    out.clear();
    for (const auto& e : columns_.column(feature)) {
      const auto w = node_weight_[e.row];
      if (w > 0) out.push_back({e.value, labels_[e.row], w});
    }
    std::sort(out.begin(), out.end(), [](const Gathered& a, const Gathered& b) { return a.value < b.value; });
  }

  std::optional<Split> find_split(std::size_t begin, std::size_t end, const std::vector<std::uint64_t>& counts,
                                  std::uint64_t weight) {
    ++stamp_;
    std::vector<std::uint32_t> touched;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& s = samples_[i];
      node_weight_[s.row] = s.weight;
      for (auto f : rows_[s.row].indices) {
        if (feat_stamp_[f] != stamp_) {
          feat_stamp_[f] = stamp_;
          feat_wnz_[f] = 0;
          touched.push_back(f);
        }
        feat_wnz_[f] += s.weight;
      }
    }
    std::sort(touched.begin(), touched.end());

    std::vector<Gathered> buf;
    std::vector<std::uint32_t> candidates;
    for (auto f : touched) {
      if (feat_wnz_[f] < weight) {
        candidates.push_back(f);
        continue;
      }
      gather(f, buf);
      if (buf.front().value != buf.back().value) candidates.push_back(f);
    }

    const std::size_t mtry = params_.features_per_split;
    if (mtry > 0 && mtry < candidates.size()) {
      for (std::size_t i = 0; i < mtry; ++i)
        std::swap(candidates[i], candidates[i + uniform_index(rng_, candidates.size() - i)]);
      candidates.resize(mtry);
      std::sort(candidates.begin(), candidates.end());
    }

    std::optional<Split> best;
    GiniScore best_score;
    std::vector<std::uint64_t> left(k_);
    std::vector<std::uint64_t> nz_counts(k_);
    for (auto f : candidates) {
      gather(f, buf);
      std::fill(nz_counts.begin(), nz_counts.end(), 0);
      std::uint64_t w_nz = 0;
      for (const auto& g : buf) {
        nz_counts[static_cast<std::size_t>(g.label)] += g.weight;
        w_nz += g.weight;
      }
      std::fill(left.begin(), left.end(), 0);
      std::uint64_t w_left = 0;
      double prev_value = 0.0;
      bool have_prev = false;
      if (w_nz < weight) {
        for (std::size_t k = 0; k < k_; ++k) left[k] = counts[k] - nz_counts[k];
        w_left = weight - w_nz;
        have_prev = true;
      }
      for (std::size_t i = 0; i < buf.size();) {
        const double v = buf[i].value;
        if (have_prev && w_left >= params_.min_samples_leaf && weight - w_left >= params_.min_samples_leaf) {
          const auto score = gini_score(left, counts, w_left, weight);
          if (!best || score.better_than(best_score)) {
            best_score = score;
            best = Split{f, midpoint(prev_value, v)};
          }
        }
        for (; i < buf.size() && buf[i].value == v; ++i) {
          left[static_cast<std::size_t>(buf[i].label)] += buf[i].weight;
          w_left += buf[i].weight;
        }
        prev_value = v;
        have_prev = true;
      }
    }

    for (std::size_t i = begin; i < end; ++i) node_weight_[samples_[i].row] = 0;
    return best;
  }

  std::span<const SparseVector> rows_;
  std::span<const int> labels_;
  std::size_t k_;
  const ColumnIndex& columns_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<WeightedSample> samples_;
  std::vector<std::uint32_t> node_weight_;
  std::vector<std::uint32_t> feat_stamp_;
  std::vector<std::uint64_t> feat_wnz_;
  std::uint32_t stamp_ = 0;
  ClassificationTree tree_;
};

void check_training_inputs(std::span<const SparseVector> rows, std::span<const int> labels, int n_classes) {
  if (rows.empty()) fail(ErrorKind::Validation, "cannot grow a tree on zero rows");
  if (rows.size() != labels.size()) fail(ErrorKind::Validation, "row count does not match label count");
  for (int l : labels)
    if (l < 0 || l >= n_classes)
      fail(ErrorKind::Validation, "label " + std::to_string(l) + " outside 0.." + std::to_string(n_classes - 1));
}

}  // namespace

ClassificationTree train_tree(std::span<const SparseVector> rows, std::span<const int> labels, int n_classes,
                              const ColumnIndex& columns, std::vector<WeightedSample> samples,
                              const TreeParams& params, Rng& rng) {
  check_training_inputs(rows, labels, n_classes);
  if (samples.empty()) fail(ErrorKind::Validation, "cannot grow a tree on an empty sample");
  GiniTreeBuilder builder(rows, labels, n_classes, columns, params, rng);
  return builder.build(std::move(samples));
}

ClassificationTree train_tree(std::span<const SparseVector> rows, std::span<const int> labels, int n_classes,
                              const TreeParams& params, Rng& rng) {
  check_training_inputs(rows, labels, n_classes);
  const ColumnIndex columns(rows, rows.front().dimension);
  std::vector<WeightedSample> samples(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) samples[i] = {static_cast<std::uint32_t>(i), 1};
  return train_tree(rows, labels, n_classes, columns, std::move(samples), params, rng);
}

// ---------------------------------------------------------------------------

namespace {

class NewtonTreeBuilder {
 public:
  NewtonTreeBuilder(std::span<const SparseVector> rows, const ColumnIndex& columns, std::span<const double> grad,
                    std::span<const double> hess, const BoostTreeParams& params)
      : rows_(rows),
        columns_(columns),
        grad_(grad),
        hess_(hess),
        params_(params),
        in_node_(rows.size(), 0),
        feat_stamp_(columns.dimension(), 0),
        feat_nnz_(columns.dimension(), 0) {}

  RegressionTree build() {
    samples_.resize(rows_.size());
    std::iota(samples_.begin(), samples_.end(), 0U);
    grow(0, samples_.size(), 0);
    return std::move(tree_);
  }

 private:
  std::int32_t make_leaf(double g, double h) {
    TreeNode node;
    node.leaf = static_cast<std::uint32_t>(tree_.leaf_values.size());
    tree_.leaf_values.push_back(-g / (h + params_.lambda));
    tree_.nodes.push_back(node);
    return static_cast<std::int32_t>(tree_.nodes.size() - 1);
  }

  std::int32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
    double g = 0.0, h = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      g += grad_[samples_[i]];
      h += hess_[samples_[i]];
    }
    if (depth >= params_.max_depth || end - begin < 2) return make_leaf(g, h);
    const auto split = find_split(begin, end, g, h);
    if (!split) return make_leaf(g, h);

    auto mid = std::stable_partition(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                                     samples_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::uint32_t r) {
                                       return rows_[r].at(split->feature) <= split->threshold;
                                     });
    const auto split_at = static_cast<std::size_t>(mid - samples_.begin());
    const auto self = static_cast<std::int32_t>(tree_.nodes.size());
    TreeNode node;
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    tree_.nodes.push_back(node);
    const auto left = grow(begin, split_at, depth + 1);
    const auto right = grow(split_at, end, depth + 1);
    tree_.nodes[static_cast<std::size_t>(self)].left = left;
    tree_.nodes[static_cast<std::size_t>(self)].right = right;
    return self;
  }

  struct Gathered {
    double value;
    double g;
    double h;
  };

  void gather(std::uint32_t feature, std::vector<Gathered>& out) const {
    out.clear();
    for (const auto& e : columns_.column(feature))
      if (in_node_[e.row]) out.push_back({e.value, grad_[e.row], hess_[e.row]});
    std::stable_sort(out.begin(), out.end(), [](const Gathered& a, const Gathered& b) { return a.value < b.value; });
  }

  std::optional<Split> find_split(std::size_t begin, std::size_t end, double g_total, double h_total) {
    ++stamp_;
    const std::size_t n = end - begin;
    std::vector<std::uint32_t> touched;
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = samples_[i];
      in_node_[r] = 1;
      for (auto f : rows_[r].indices) {
        if (feat_stamp_[f] != stamp_) {
          feat_stamp_[f] = stamp_;
          feat_nnz_[f] = 0;
          touched.push_back(f);
        }
        ++feat_nnz_[f];
      }
    }
    std::sort(touched.begin(), touched.end());

    const double lambda = params_.lambda;
    const double parent = g_total * g_total / (h_total + lambda);
    std::optional<Split> best;
    double best_gain = 0.0;
    std::vector<Gathered> buf;
    for (auto f : touched) {
      gather(f, buf);
      const bool has_zeros = feat_nnz_[f] < n;
      if (!has_zeros && buf.front().value == buf.back().value) continue;
      double g_nz = 0.0, h_nz = 0.0;
      for (const auto& e : buf) {
        g_nz += e.g;
        h_nz += e.h;
      }
      double gl = 0.0, hl = 0.0;
      double prev_value = 0.0;
      bool have_prev = false;
      if (has_zeros) {
        gl = g_total - g_nz;
        hl = h_total - h_nz;
        have_prev = true;
      }
      for (std::size_t i = 0; i < buf.size();) {
        const double v = buf[i].value;
        if (have_prev) {
          const double gr = g_total - gl;
          const double hr = h_total - hl;
          if (hl >= params_.min_child_weight && hr >= params_.min_child_weight) {
            const double gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent) - params_.gamma;
            if (gain > best_gain) {
              best_gain = gain;
              best = Split{f, midpoint(prev_value, v)};
            }
          }
        }
        for (; i < buf.size() && buf[i].value == v; ++i) {
          gl += buf[i].g;
          hl += buf[i].h;
        }
        prev_value = v;
        have_prev = true;
      }
    }
    for (std::size_t i = begin; i < end; ++i) in_node_[samples_[i]] = 0;
    return best;
  }

  std::span<const SparseVector> rows_;
  const ColumnIndex& columns_;
  std::span<const double> grad_;
  std::span<const double> hess_;
  const BoostTreeParams& params_;
  std::vector<std::uint32_t> samples_;
  std::vector<std::uint8_t> in_node_;
  std::vector<std::uint32_t> feat_stamp_;
  std::vector<std::size_t> feat_nnz_;
  std::uint32_t stamp_ = 0;
  RegressionTree tree_;
};

}  // namespace

RegressionTree train_boost_tree(std::span<const SparseVector> rows, const ColumnIndex& columns,
                                std::span<const double> grad, std::span<const double> hess,
                                const BoostTreeParams& params) {
  if (rows.empty()) fail(ErrorKind::Validation, "cannot grow a tree on zero rows");
  if (grad.size() != rows.size() || hess.size() != rows.size())
    fail(ErrorKind::Validation, "gradient/hessian length does not match row count");
  NewtonTreeBuilder builder(rows, columns, grad, hess, params);
  return builder.build();
}

}  // namespace attribkit
