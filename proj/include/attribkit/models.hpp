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
#include <string>
#include <variant>
#include <vector>

#include "attribkit/corpus.hpp"
#include "attribkit/features.hpp"
#include "attribkit/tree.hpp"
#include "json.hpp"

namespace attribkit {

/// Anything that maps a tf-idf row onto a class distribution. Implementations
/// must be safe to call concurrently.
class ProbabilityModel {
 public:
  virtual ~ProbabilityModel() = default;
  virtual std::size_t n_classes() const = 0;
  virtual std::uint32_t dimension() const = 0;
  virtual std::vector<double> predict_proba(const SparseVector& row) const = 0;
};

/// Index of the largest component; ties go to the lowest index.
std::size_t argmax(std::span<const double> p);

// ---------------------------------------------------------------------------
// Random forest

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  std::size_t features_per_split = 0;  // 0: ceil(sqrt(V))
  bool bootstrap = true;
  std::uint64_t seed = kDefaultSeed;

  nlohmann::json to_json() const;
};

struct ForestModel {
  std::vector<ClassificationTree> trees;
  int n_classes = 0;
  std::uint32_t dimension = 0;
  ForestParams params;

  /// Mean of per-tree leaf class distributions.
  std::vector<double> predict_proba(const SparseVector& row) const;
  bool operator==(const ForestModel& o) const {
    return trees == o.trees && n_classes == o.n_classes && dimension == o.dimension;
  }
};

/// Seed of tree `index`'s private stream.
std::uint64_t forest_tree_seed(std::uint64_t seed, std::size_t index);

/// Trees are grown in parallel (OpenMP); each tree owns an RNG stream seeded
/// from seed + tree index, so the result equals train_forest_serial.
ForestModel train_forest(const FeatureMatrix& matrix, int n_classes, const ForestParams& params);
ForestModel train_forest_serial(const FeatureMatrix& matrix, int n_classes, const ForestParams& params);

// ---------------------------------------------------------------------------
// Gradient boosting

struct BoostedParams {
  std::size_t n_rounds = 50;
  std::size_t max_depth = 4;
  double learning_rate = 0.3;  // eta
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  std::uint64_t seed = kDefaultSeed;  // recorded only; training is deterministic

  nlohmann::json to_json() const;
};

struct BoostedModel {
  int n_classes = 0;
  std::uint32_t dimension = 0;
  /// One output for binary (logit of class 1), otherwise one per class.
  std::size_t n_outputs = 0;
  std::vector<double> base_margin;
  /// rounds x n_outputs, row-major.
  std::vector<RegressionTree> trees;
  BoostedParams params;
  /// Mean training log-loss after each round (index 0: before any tree). Not persisted.
  std::vector<double> train_loss;

  std::size_t n_rounds() const { return n_outputs == 0 ? 0 : trees.size() / n_outputs; }
  std::vector<double> margins(const SparseVector& row) const;
  std::vector<double> predict_proba(const SparseVector& row) const;
  bool operator==(const BoostedModel& o) const {
    return n_classes == o.n_classes && dimension == o.dimension && n_outputs == o.n_outputs &&
           base_margin == o.base_margin && trees == o.trees;
  }
};

/// Probabilities are clipped to [1e-15, 1 - 1e-15] before gradients are formed.
inline constexpr double kProbabilityClip = 1e-15;

/// Logistic loss (binary) or softmax cross-entropy (multi); per-class trees of
/// a round are grown in parallel.
BoostedModel train_boosted(const FeatureMatrix& matrix, int n_classes, const BoostedParams& params);
BoostedModel train_boosted_serial(const FeatureMatrix& matrix, int n_classes, const BoostedParams& params);

/// Mean log-loss of margins against labels (used for the monotonicity check).
double boosted_log_loss(const BoostedModel& model, const FeatureMatrix& matrix);

// ---------------------------------------------------------------------------
// Softmax regression baseline

struct LinearParams {
  std::size_t epochs = 30;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::size_t batch_size = 32;
  std::uint64_t seed = kDefaultSeed;

  nlohmann::json to_json() const;
};

struct LinearModel {
  std::size_t n_classes = 0;
  std::uint32_t dimension = 0;
  std::vector<double> weights;  // n_classes x dimension, row-major
  std::vector<double> bias;
  LinearParams params;

  std::vector<double> scores(const SparseVector& row) const;
  std::vector<double> predict_proba(const SparseVector& row) const;
  bool operator==(const LinearModel& o) const {
    return n_classes == o.n_classes && dimension == o.dimension && weights == o.weights && bias == o.bias;
  }
};

/// Mean softmax cross-entropy over `batch` plus (l2 / 2) * |W|^2 (bias unpenalized).
/// Fills gradients when the pointers are non-null.
double linear_objective(const LinearModel& model, std::span<const SparseVector> rows, std::span<const int> labels,
                        std::span<const std::size_t> batch, double l2, std::vector<double>* grad_w,
                        std::vector<double>* grad_b);

/// Mini-batch gradient descent from zero weights.
LinearModel train_linear(const FeatureMatrix& matrix, int n_classes, const LinearParams& params);

// ---------------------------------------------------------------------------

enum class ModelKind : std::uint8_t { Forest = 0, Boosted = 1, Linear = 2 };

std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view s);

struct ModelMetadata {
  ModelKind kind = ModelKind::Forest;
  Task task = Task::Binary;
  std::vector<std::string> class_names;
  std::string vocabulary_hash;
  std::string stopword_hash;
  std::string preprocess_version;
  std::string feature_version;
  std::uint32_t dimension = 0;
  nlohmann::json hyperparameters;

  nlohmann::json to_json() const;
  static ModelMetadata from_json(const nlohmann::json& j);
};

/// A trained model plus everything needed to check that inputs were
/// featurized the same way it was trained.
class Classifier : public ProbabilityModel {
 public:
  using Variant = std::variant<ForestModel, BoostedModel, LinearModel>;

  Classifier(ModelMetadata metadata, Variant model);

  const ModelMetadata& metadata() const { return metadata_; }
  const Variant& model() const { return model_; }

  std::size_t n_classes() const override { return metadata_.class_names.size(); }
  std::uint32_t dimension() const override { return metadata_.dimension; }
  /// Throws on dimension mismatch or when the model is blocked as incompatible.
  std::vector<double> predict_proba(const SparseVector& row) const override;
  std::size_t predict(const SparseVector& row) const;

  /// OpenMP-parallel over rows.
  std::vector<std::vector<double>> predict_proba_batch(std::span<const SparseVector> rows) const;
  std::vector<std::vector<double>> predict_proba_batch_serial(std::span<const SparseVector> rows) const;

  /// Compares the recorded preprocessing against the caller's. A mismatch adds
  /// a warning and blocks prediction unless `allow_mismatch` is set.
  std::vector<std::string> check_compatibility(const std::string& vocabulary_hash, const std::string& stopword_hash,
                                               bool allow_mismatch);
  bool blocked() const { return !block_reason_.empty(); }

 private:
  ModelMetadata metadata_;
  Variant model_;
  std::string block_reason_;
};

}  // namespace attribkit
