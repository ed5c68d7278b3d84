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
#include <string>
#include <utility>
#include <vector>

#include "attribkit/corpus.hpp"
#include "attribkit/features.hpp"
#include "attribkit/models.hpp"
#include "json.hpp"

namespace attribkit {

enum class Averaging { Macro, Weighted };

std::string_view to_string(Averaging a);
std::optional<Averaging> parse_averaging(std::string_view s);

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  std::optional<double> auc;  // absent when the class has no positives or no negatives in the test set
};

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), from (0,0) to (1,1)
  double auc = 0.0;
};

struct EvalReport {
  std::string model_name;
  Task task = Task::Binary;
  Averaging averaging = Averaging::Macro;
  std::size_t n_rows = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<std::vector<double>> confusion_pct;
  std::vector<std::optional<RocCurve>> roc;  // one-vs-rest, per class

  std::string to_markdown() const;
  std::string metrics_csv() const;
  std::string confusion_csv() const;
  std::string confusion_svg() const;
  nlohmann::ordered_json to_json() const;
};

/// Row-normalized percentages; rows with no support stay all-zero.
std::vector<std::vector<double>> confusion_pct(const std::vector<std::vector<std::size_t>>& confusion);

/// Threshold sweep over distinct scores, highest first, with a trapezoidal AUC.
/// Tied scores move along a diagonal, which credits ties by one half.
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<std::uint8_t>& positive);

/// Metrics from true labels and per-row class distributions. Macro averages
/// run over classes present in the truth; a class never predicted has
/// precision 0.
EvalReport evaluate_predictions(const std::vector<int>& labels, const std::vector<std::vector<double>>& probabilities,
                                const std::vector<std::string>& class_names, Averaging averaging = Averaging::Macro);

/// Predicts every row of `test` and scores it. A Classifier must carry the
/// same vocabulary hash as the matrix.
EvalReport evaluate(const ProbabilityModel& model, const FeatureMatrix& test,
                    const std::vector<std::string>& class_names, Averaging averaging = Averaging::Macro);

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SyntheticClass {
  Subcategory subcategory = Subcategory::Human;
  std::size_t n_docs = 100;
  /// Tokens drawn from the marker pool instead of the background, in [0, 1].
  double marker_weight = 0.1;
  std::vector<std::string> markers;
  /// Sentence length range (content tokens); a wider range raises burstiness.
  std::size_t min_sentence = 10;
  std::size_t max_sentence = 20;
};

struct SyntheticSpec {
  std::vector<SyntheticClass> classes;
  std::vector<std::string> background;  // shared vocabulary, Zipf-distributed
  double zipf_exponent = 1.0;
  /// Chance of a filler stopword before each content token (removed again by preprocessing).
  double filler_rate = 0.3;
  std::size_t min_sentences = 6;
  std::size_t max_sentences = 12;
  std::uint64_t seed = kDefaultSeed;
};

/// Pronounceable pseudo-words ending in a vowel: untouched by the lemmatizer
/// and never stopwords. Deterministic in (seed, count).
std::vector<std::string> pseudo_words(std::size_t count, std::uint64_t seed);

/// 300 human documents and 60 from each of the five tools, labelled for the binary task.
SyntheticSpec binary_preset(std::uint64_t seed = kDefaultSeed, double marker_weight = 0.12);
/// 100 documents per class for the six-class task. `human_marker_weight`
/// overrides the human class's marker strength when set.
SyntheticSpec multi_preset(std::uint64_t seed = kDefaultSeed, double marker_weight = 0.12,
                           std::optional<double> human_marker_weight = std::nullopt);

/// Document i of the corpus draws from derive_seed(seed, "synthetic", i).
Corpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace attribkit
