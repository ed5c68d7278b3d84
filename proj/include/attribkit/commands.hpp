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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "attribkit/detector.hpp"
#include "attribkit/eval.hpp"
#include "attribkit/models.hpp"

namespace attribkit {

/// Everything a subcommand may read. Unset optionals fall back to the
/// module defaults.
struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::string format;  // "csv", "jsonl", or empty to go by file extension
  Task task = Task::Binary;
  ModelKind model = ModelKind::Forest;
  std::filesystem::path model_dir;  // artifacts of a previous `train`
  std::uint64_t seed = kDefaultSeed;
  double test_fraction = 0.2;
  bool stratified = false;

  std::optional<std::size_t> n_trees;
  std::optional<std::size_t> n_rounds;
  std::optional<std::size_t> max_depth;
  std::optional<double> eta;
  std::optional<double> lambda;
  std::optional<double> gamma;
  std::optional<std::size_t> epochs;
  std::size_t min_df = 1;
  std::optional<std::size_t> max_features;

  std::size_t lime_samples = 1000;
  double kernel_width = 0.25;
  std::size_t top_k = 10;
  std::vector<std::string> ids;  // explain: restrict to these documents
  std::size_t max_docs = 0;      // explain: 0 means all; profile: per class, 0 means 25

  std::string detector_endpoint;
  std::optional<std::filesystem::path> fixtures_dir;
  std::optional<std::filesystem::path> detector_config;

  std::optional<std::filesystem::path> stopwords;
  bool allow_mismatch = false;
  Averaging average = Averaging::Macro;
  std::string split = "all";  // evaluate: "all" or "test"

  double marker_weight = 0.12;                 // synth
  std::optional<double> human_marker_weight;   // synth, multi only

  std::filesystem::path out = "out";
};

/// Progress sink; receives one line at a time without a trailing newline.
using Logger = std::function<void(const std::string&)>;

struct TrainResult {
  EvalReport report;
  std::filesystem::path model_path;
};

void cmd_stats(const RunConfig& cfg, const Logger& log);
TrainResult cmd_train(const RunConfig& cfg, const Logger& log);
void cmd_predict(const RunConfig& cfg, const Logger& log);
void cmd_explain(const RunConfig& cfg, const Logger& log);
EvalReport cmd_evaluate(const RunConfig& cfg, const Logger& log);
void cmd_profile(const RunConfig& cfg, const Logger& log);
ComparisonReport cmd_compare(const RunConfig& cfg, const Logger& log);
void cmd_synth(const RunConfig& cfg, const Logger& log);

/// Loads and merges every input, choosing the reader by --format or extension.
Corpus load_inputs(const RunConfig& cfg);

/// Trains the configured model kind on a featurized training split.
Classifier train_classifier(const RunConfig& cfg, const FeatureMatrix& train, const std::vector<std::string>& class_names,
                            const std::string& stopword_hash);

}  // namespace attribkit
