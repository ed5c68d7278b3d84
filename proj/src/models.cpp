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

#include "attribkit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "attribkit/parallel.hpp"

namespace attribkit {

std::size_t argmax(std::span<const double> p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.size(); ++k)
    if (p[k] > p[best]) best = k;
  return best;
}

namespace {

void check_matrix(const FeatureMatrix& m, int n_classes) {
  if (m.rows.empty()) fail(ErrorKind::Validation, "training matrix has no rows");
  if (m.labels.size() != m.rows.size()) fail(ErrorKind::Validation, "training matrix rows and labels differ in count");
  if (m.dimension == 0) fail(ErrorKind::Validation, "training matrix has zero columns");
  if (n_classes < 2) fail(ErrorKind::Validation, "need at least two classes");
  std::set<int> present;
  for (int l : m.labels) {
    if (l < 0 || l >= n_classes)
      fail(ErrorKind::Validation, "label " + std::to_string(l) + " outside 0.." + std::to_string(n_classes - 1));
    present.insert(l);
  }
  if (present.size() < 2) fail(ErrorKind::Validation, "training set contains a single class");
  for (const auto& r : m.rows)
    if (r.dimension != m.dimension) fail(ErrorKind::Validation, "row dimension differs from matrix dimension");
}

double sigmoid(double m) {
  if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

void softmax_inplace(std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (auto& x : v) {
    x = std::exp(x - mx);
    s += x;
  }
  for (auto& x : v) x /= s;
}

double clip(double p) { return std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip); }

}  // namespace

// ---------------------------------------------------------------------------
// Forest

nlohmann::json ForestParams::to_json() const {
  return {{"n_trees", n_trees},
          {"max_depth", max_depth ? nlohmann::json(*max_depth) : nlohmann::json(nullptr)},
          {"min_samples_split", min_samples_split},
          {"min_samples_leaf", min_samples_leaf},
          {"features_per_split", features_per_split},
          {"bootstrap", bootstrap},
          {"seed", seed}};
}

std::vector<double> ForestModel::predict_proba(const SparseVector& row) const {
  std::vector<double> p(static_cast<std::size_t>(n_classes), 0.0);
  for (const auto& t : trees) t.accumulate_distribution(row, p);
  if (!trees.empty())
    for (auto& x : p) x /= static_cast<double>(trees.size());
  return p;
}

std::uint64_t forest_tree_seed(std::uint64_t seed, std::size_t index) { return splitmix64(seed + index); }

namespace {

ForestModel train_forest_impl(const FeatureMatrix& matrix, int n_classes, const ForestParams& params, bool parallel) {
  check_matrix(matrix, n_classes);
  if (params.n_trees == 0) fail(ErrorKind::Validation, "forest needs at least one tree");
  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_samples_split = params.min_samples_split;
  tp.min_samples_leaf = params.min_samples_leaf;
  tp.features_per_split = params.features_per_split != 0
                              ? params.features_per_split
                              : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(matrix.dimension))));

  const ColumnIndex columns(matrix.rows, matrix.dimension);
  ForestModel model;
  model.n_classes = n_classes;
  model.dimension = matrix.dimension;
  model.params = params;
  model.trees.resize(params.n_trees);
  const std::size_t n = matrix.rows.size();

  for_each_index(params.n_trees, parallel, [&](std::size_t t) {
    Rng rng(forest_tree_seed(params.seed, t));
    std::vector<WeightedSample> samples;
    if (params.bootstrap) {
      std::vector<std::uint32_t> counts(n, 0);
      for (std::size_t i = 0; i < n; ++i) ++counts[uniform_index(rng, n)];
      for (std::size_t i = 0; i < n; ++i)
        if (counts[i] > 0) samples.push_back({static_cast<std::uint32_t>(i), counts[i]});
    } else {
      samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) samples[i] = {static_cast<std::uint32_t>(i), 1};
    }
    model.trees[t] = train_tree(matrix.rows, matrix.labels, n_classes, columns, std::move(samples), tp, rng);
  });
  return model;
}

}  // namespace

ForestModel train_forest(const FeatureMatrix& matrix, int n_classes, const ForestParams& params) {
  return train_forest_impl(matrix, n_classes, params, true);
}

ForestModel train_forest_serial(const FeatureMatrix& matrix, int n_classes, const ForestParams& params) {
  return train_forest_impl(matrix, n_classes, params, false);
}

// ---------------------------------------------------------------------------
// Boosting

nlohmann::json BoostedParams::to_json() const {
  return {{"n_rounds", n_rounds}, {"max_depth", max_depth},
          {"eta", learning_rate}, {"lambda", lambda},
          {"gamma", gamma},       {"min_child_weight", min_child_weight},
          {"seed", seed}};
}

std::vector<double> BoostedModel::margins(const SparseVector& row) const {
  std::vector<double> m = base_margin;
  for (std::size_t t = 0; t < trees.size(); ++t) m[t % n_outputs] += params.learning_rate * trees[t].predict(row);
  return m;
}

std::vector<double> BoostedModel::predict_proba(const SparseVector& row) const {
  auto m = margins(row);
  if (n_outputs == 1) {
    const double p1 = sigmoid(m[0]);
    return {1.0 - p1, p1};
  }
  softmax_inplace(m);
  return m;
}

namespace {

/// Mean log-loss of per-row margins (n x n_outputs, row-major).
double margin_loss(const std::vector<double>& margins, std::span<const int> labels, std::size_t n_outputs) {
  double total = 0.0;
  std::vector<double> p(n_outputs);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (n_outputs == 1) {
      const double p1 = clip(sigmoid(margins[i]));
      total -= labels[i] == 1 ? std::log(p1) : std::log(1.0 - p1);
    } else {
      std::copy_n(margins.begin() + static_cast<std::ptrdiff_t>(i * n_outputs), n_outputs, p.begin());
      softmax_inplace(p);
      total -= std::log(clip(p[static_cast<std::size_t>(labels[i])]));
    }
  }
  return total / static_cast<double>(labels.size());
}

BoostedModel train_boosted_impl(const FeatureMatrix& matrix, int n_classes, const BoostedParams& params,
                                bool parallel) {
  check_matrix(matrix, n_classes);
  if (!(params.learning_rate > 0.0) || !(params.lambda >= 0.0) || !(params.gamma >= 0.0))
    fail(ErrorKind::Validation, "boosting needs eta > 0, lambda >= 0, gamma >= 0");
  const std::size_t n = matrix.rows.size();
  const std::size_t n_out = n_classes == 2 ? 1 : static_cast<std::size_t>(n_classes);
  const ColumnIndex columns(matrix.rows, matrix.dimension);
  BoostTreeParams tp{params.max_depth, params.lambda, params.gamma, params.min_child_weight};

  BoostedModel model;
  model.n_classes = n_classes;
  model.dimension = matrix.dimension;
  model.n_outputs = n_out;
  model.base_margin.assign(n_out, 0.0);
  model.params = params;

  std::vector<double> margins(n * n_out, 0.0);
  std::vector<std::vector<double>> grad(n_out, std::vector<double>(n)), hess(n_out, std::vector<double>(n));
  model.train_loss.push_back(margin_loss(margins, matrix.labels, n_out));

  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for_each_index(n, parallel, [&](std::size_t i) {
      const int y = matrix.labels[i];
      if (n_out == 1) {
        const double p = clip(sigmoid(margins[i]));
        grad[0][i] = p - (y == 1 ? 1.0 : 0.0);
        hess[0][i] = p * (1.0 - p);
        return;
      }
      std::vector<double> p(margins.begin() + static_cast<std::ptrdiff_t>(i * n_out),
                            margins.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_out));
      softmax_inplace(p);
      for (std::size_t k = 0; k < n_out; ++k) {
        const double pk = clip(p[k]);
        grad[k][i] = pk - (static_cast<std::size_t>(y) == k ? 1.0 : 0.0);
        hess[k][i] = pk * (1.0 - pk);
      }
    });

    std::vector<RegressionTree> round_trees(n_out);
    for_each_index(n_out, parallel && n_out > 1, [&](std::size_t k) {
      round_trees[k] = train_boost_tree(matrix.rows, columns, grad[k], hess[k], tp);
    });

    for_each_index(n, parallel, [&](std::size_t i) {
      for (std::size_t k = 0; k < n_out; ++k)
        margins[i * n_out + k] += params.learning_rate * round_trees[k].predict(matrix.rows[i]);
    });
    for (auto& t : round_trees) model.trees.push_back(std::move(t));
    const double loss = margin_loss(margins, matrix.labels, n_out);
    if (!std::isfinite(loss))
      fail(ErrorKind::Numeric, "boosting loss became non-finite in round " + std::to_string(round + 1));
    model.train_loss.push_back(loss);
  }
  return model;
}

}  // namespace

BoostedModel train_boosted(const FeatureMatrix& matrix, int n_classes, const BoostedParams& params) {
  return train_boosted_impl(matrix, n_classes, params, true);
}

BoostedModel train_boosted_serial(const FeatureMatrix& matrix, int n_classes, const BoostedParams& params) {
  return train_boosted_impl(matrix, n_classes, params, false);
}

double boosted_log_loss(const BoostedModel& model, const FeatureMatrix& matrix) {
  std::vector<double> margins;
  margins.reserve(matrix.rows.size() * model.n_outputs);
  for (const auto& r : matrix.rows) {
    const auto m = model.margins(r);
    margins.insert(margins.end(), m.begin(), m.end());
  }
  return margin_loss(margins, matrix.labels, model.n_outputs);
}

// ---------------------------------------------------------------------------
// Linear

nlohmann::json LinearParams::to_json() const {
  return {{"epochs", epochs}, {"learning_rate", learning_rate}, {"l2", l2}, {"batch_size", batch_size}, {"seed", seed}};
}

std::vector<double> LinearModel::scores(const SparseVector& row) const {
  std::vector<double> s = bias;
  for (std::size_t k = 0; k < n_classes; ++k) {
    const double* w = weights.data() + k * dimension;
    for (std::size_t j = 0; j < row.nnz(); ++j) s[k] += w[row.indices[j]] * row.values[j];
  }
  return s;
}

std::vector<double> LinearModel::predict_proba(const SparseVector& row) const {
  auto s = scores(row);
  softmax_inplace(s);
  return s;
}

double linear_objective(const LinearModel& model, std::span<const SparseVector> rows, std::span<const int> labels,
                        std::span<const std::size_t> batch, double l2, std::vector<double>* grad_w,
                        std::vector<double>* grad_b) {
  const std::size_t K = model.n_classes;
  const std::size_t V = model.dimension;
  if (grad_w) grad_w->assign(K * V, 0.0);
  if (grad_b) grad_b->assign(K, 0.0);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (auto i : batch) {
    auto p = model.predict_proba(rows[i]);
    const auto y = static_cast<std::size_t>(labels[i]);
    loss -= std::log(std::max(p[y], std::numeric_limits<double>::min()));
    if (!grad_w && !grad_b) continue;
    for (std::size_t k = 0; k < K; ++k) {
      const double delta = (p[k] - (k == y ? 1.0 : 0.0)) * inv_b;
      if (grad_b) (*grad_b)[k] += delta;
      if (grad_w)
        for (std::size_t j = 0; j < rows[i].nnz(); ++j)
          (*grad_w)[k * V + rows[i].indices[j]] += delta * rows[i].values[j];
    }
  }
  loss *= inv_b;
  double sq = 0.0;
  for (double w : model.weights) sq += w * w;
  loss += 0.5 * l2 * sq;
  if (grad_w)
    for (std::size_t t = 0; t < model.weights.size(); ++t) (*grad_w)[t] += l2 * model.weights[t];
  return loss;
}

LinearModel train_linear(const FeatureMatrix& matrix, int n_classes, const LinearParams& params) {
  check_matrix(matrix, n_classes);
  if (params.batch_size == 0) fail(ErrorKind::Validation, "batch size must be positive");
  LinearModel model;
  model.n_classes = static_cast<std::size_t>(n_classes);
  model.dimension = matrix.dimension;
  model.weights.assign(model.n_classes * model.dimension, 0.0);
  model.bias.assign(model.n_classes, 0.0);
  model.params = params;

  const std::size_t n = matrix.rows.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> all = order;
  Rng rng(params.seed);
  std::vector<double> gw, gb;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (std::size_t start = 0; start < n; start += params.batch_size) {
      const std::span<const std::size_t> batch(order.data() + start, std::min(params.batch_size, n - start));
      linear_objective(model, matrix.rows, matrix.labels, batch, params.l2, &gw, &gb);
      for (std::size_t t = 0; t < gw.size(); ++t) model.weights[t] -= params.learning_rate * gw[t];
      for (std::size_t k = 0; k < gb.size(); ++k) model.bias[k] -= params.learning_rate * gb[k];
    }
    const double loss = linear_objective(model, matrix.rows, matrix.labels, all, params.l2, nullptr, nullptr);
    if (!std::isfinite(loss))
      fail(ErrorKind::Numeric, "linear model loss became non-finite at epoch " + std::to_string(epoch + 1));
  }
  return model;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Forest: return "forest";
    case ModelKind::Boosted: return "boosted";
    case ModelKind::Linear: return "linear";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  if (s == "forest") return ModelKind::Forest;
  if (s == "boosted") return ModelKind::Boosted;
  if (s == "linear") return ModelKind::Linear;
  return std::nullopt;
}

nlohmann::json ModelMetadata::to_json() const {
  nlohmann::json label_map = nlohmann::json::object();
  for (std::size_t i = 0; i < class_names.size(); ++i) label_map[class_names[i]] = i;
  return {{"kind", to_string(kind)},
          {"task", to_string(task)},
          {"class_names", class_names},
          {"label_map", label_map},
          {"vocabulary_hash", vocabulary_hash},
          {"stopword_hash", stopword_hash},
          {"preprocess_version", preprocess_version},
          {"feature_version", feature_version},
          {"dimension", dimension},
          {"hyperparameters", hyperparameters}};
}

ModelMetadata ModelMetadata::from_json(const nlohmann::json& j) {
  ModelMetadata m;
  try {
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!kind || !task) fail(ErrorKind::Integrity, "model metadata names an unknown model kind or task");
    m.kind = *kind;
    m.task = *task;
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    m.vocabulary_hash = j.at("vocabulary_hash").get<std::string>();
    m.stopword_hash = j.at("stopword_hash").get<std::string>();
    m.preprocess_version = j.at("preprocess_version").get<std::string>();
    m.feature_version = j.at("feature_version").get<std::string>();
    m.dimension = j.at("dimension").get<std::uint32_t>();
    m.hyperparameters = j.at("hyperparameters");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Integrity, std::string("model metadata is incomplete: ") + e.what());
  }
  return m;
}

Classifier::Classifier(ModelMetadata metadata, Variant model) : metadata_(std::move(metadata)), model_(std::move(model)) {
  const auto [k, dim] = std::visit(
      [](const auto& m) { return std::pair<std::size_t, std::uint32_t>(static_cast<std::size_t>(m.n_classes), m.dimension); },
      model_);
  if (k != metadata_.class_names.size())
    fail(ErrorKind::Integrity, "model has " + std::to_string(k) + " classes but metadata lists " +
                                   std::to_string(metadata_.class_names.size()));
  if (dim != metadata_.dimension) fail(ErrorKind::Integrity, "model dimension disagrees with its metadata");
  if (std::holds_alternative<ForestModel>(model_)) metadata_.kind = ModelKind::Forest;
  if (std::holds_alternative<BoostedModel>(model_)) metadata_.kind = ModelKind::Boosted;
  if (std::holds_alternative<LinearModel>(model_)) metadata_.kind = ModelKind::Linear;
}

std::vector<double> Classifier::predict_proba(const SparseVector& row) const {
  if (blocked()) fail(ErrorKind::Integrity, block_reason_);
  if (row.dimension != metadata_.dimension)
    fail(ErrorKind::Validation, "row dimension " + std::to_string(row.dimension) + " does not match model dimension " +
                                    std::to_string(metadata_.dimension));
  return std::visit([&](const auto& m) { return m.predict_proba(row); }, model_);
}

std::size_t Classifier::predict(const SparseVector& row) const { return argmax(predict_proba(row)); }

std::vector<std::vector<double>> Classifier::predict_proba_batch_serial(std::span<const SparseVector> rows) const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict_proba(r));
  return out;
}

std::vector<std::vector<double>> Classifier::predict_proba_batch(std::span<const SparseVector> rows) const {
  std::vector<std::vector<double>> out(rows.size());
  for_each_index(rows.size(), true, [&](std::size_t i) { out[i] = predict_proba(rows[i]); });
  return out;
}

std::vector<std::string> Classifier::check_compatibility(const std::string& vocabulary_hash,
                                                         const std::string& stopword_hash, bool allow_mismatch) {
  std::vector<std::string> problems;
  if (vocabulary_hash != metadata_.vocabulary_hash)
    problems.push_back("vocabulary hash " + vocabulary_hash + " differs from the model's " +
                       metadata_.vocabulary_hash);
  if (stopword_hash != metadata_.stopword_hash)
    problems.push_back("stopword list hash " + stopword_hash + " differs from the model's " +
                       metadata_.stopword_hash);
  block_reason_.clear();
  if (!problems.empty() && !allow_mismatch) {
    block_reason_ = "model refuses to predict: " + problems.front() + " (override to force)";
  }
  return problems;
}

}  // namespace attribkit
