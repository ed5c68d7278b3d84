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
#include <string>
#include <vector>

#include "attribkit/features.hpp"
#include "attribkit/models.hpp"
#include "json.hpp"

namespace attribkit {

/// Word-presence view of one document. Only in-vocabulary words become
/// interpretable features, since removing an unknown word cannot change the
/// model input.
struct InterpretableInstance {
  std::vector<std::string> distinct_words;  // first-appearance order
  std::vector<std::uint32_t> word_index;    // vocabulary column per distinct word
  std::vector<std::uint32_t> word_count;    // occurrences per distinct word
  SparseVector original_row;
  TokenList document;
};

/// Throws "unexplainable instance" when no token is in the vocabulary.
InterpretableInstance make_instance(const TokenList& doc, const Vocabulary& vocab);

struct PerturbedSample {
  std::vector<std::uint8_t> mask;  // 1 keeps the word
  SparseVector row;
  double distance = 0.0;
};

/// Cosine distance 1 - cos(a, b); a zero vector on either side gives 1.
double cosine_distance(const SparseVector& a, const SparseVector& b);

/// tf-idf row of the instance with masked-out words removed everywhere.
SparseVector masked_row(const InterpretableInstance& instance, const std::vector<std::uint8_t>& mask,
                        const Vocabulary& vocab);

/// First sample keeps every word; the rest keep each word with probability 1/2.
std::vector<PerturbedSample> perturb(const InterpretableInstance& instance, const Vocabulary& vocab,
                                     std::size_t n_samples, Rng& rng);

/// exp(-d^2 / sigma^2).
double kernel_weight(double distance, double width);

struct RidgeFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
  double r_squared = 0.0;  // weighted; 1 for a constant target
};

/// Weighted ridge regression with an unpenalized intercept, solved through
/// the normal equations. `design` is row-major n x p.
RidgeFit weighted_ridge(const std::vector<double>& design, std::size_t n, std::size_t p,
                        const std::vector<double>& target, const std::vector<double>& weights, double ridge);

struct ExplainParams {
  std::size_t top_k = 10;
  std::size_t n_samples = 1000;
  double kernel_width = 0.25;
  double ridge = 1.0;

  nlohmann::ordered_json to_json() const;
};

struct WordWeight {
  std::string word;
  double coefficient = 0.0;
  bool operator==(const WordWeight&) const = default;
};

struct Explanation {
  std::string source_id;
  int target_class = 0;
  std::string target_name;
  std::vector<WordWeight> weighted_words;  // by |coefficient| descending
  double intercept = 0.0;
  double local_fit_quality = 0.0;
  ExplainParams params;

  nlohmann::ordered_json to_json() const;
  std::string to_svg() const;
};

/// Surrogate fit of the model's probability for `target_class` around the
/// instance. Model predictions over samples run in parallel when requested.
Explanation explain_instance(const ProbabilityModel& model, const InterpretableInstance& instance,
                             const Vocabulary& vocab, int target_class, const ExplainParams& params, Rng& rng,
                             bool parallel = true);

struct ProfileEntry {
  std::string word;
  double importance = 0.0;  // mean |coefficient|
};

struct ClassProfile {
  int class_label = 0;
  std::string class_name;
  std::vector<ProfileEntry> entries;
  std::size_t n_instances_aggregated = 0;
  /// Documents that could not be explained (no in-vocabulary token).
  std::vector<std::string> skipped;

  nlohmann::ordered_json to_json() const;
  std::string to_svg() const;
};

/// Explains every document against `class_label` and averages |coefficient|
/// per word over the explained documents. Document i draws from the stream
/// derive_seed(seed, "lime", i); documents run in parallel.
ClassProfile class_profile(const ProbabilityModel& model, const std::vector<TokenList>& docs,
                           const Vocabulary& vocab, int class_label, const ExplainParams& params, std::uint64_t seed);
ClassProfile class_profile_serial(const ProbabilityModel& model, const std::vector<TokenList>& docs,
                                  const Vocabulary& vocab, int class_label, const ExplainParams& params,
                                  std::uint64_t seed);

}  // namespace attribkit
