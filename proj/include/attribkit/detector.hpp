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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "attribkit/corpus.hpp"
#include "attribkit/preprocess.hpp"
#include "json.hpp"

namespace attribkit {

// ---------------------------------------------------------------------------
// Verdict bands

enum class Band : std::uint8_t { Human = 0, AI, Mix, DifferentResult, NotRecognized };

inline constexpr std::array<Band, 5> kAllBands = {Band::Human, Band::AI, Band::Mix, Band::DifferentResult,
                                                  Band::NotRecognized};

/// Texts shorter than this many Unicode scalars are not scored.
inline constexpr std::size_t kMinDetectorChars = 250;

std::string_view to_string(Band b);
/// The message an external detector shows for each band.
std::string_view band_message(Band b);

/// 0-10 Human, 11-39 DifferentResult, 40-88 Mix, 89-100 AI.
Band band_for_percentage(int ai_percentage);

struct DetectorVerdict {
  Band band = Band::NotRecognized;
  std::optional<int> ai_percentage;
  std::string raw_message;

  bool operator==(const DetectorVerdict&) const = default;
};

DetectorVerdict verdict_for_percentage(int ai_percentage);
DetectorVerdict not_recognized_verdict();

// ---------------------------------------------------------------------------
// Baseline: bigram perplexity plus burstiness

/// Laplace-smoothed bigram model. Every sequence is padded as
/// <s> w1 .. wn </s>; unseen words map to <unk>. The outcome space has
/// V = distinct training words + 2 (</s> and <unk>).
class NgramLM {
 public:
  NgramLM() = default;

  double alpha() const { return alpha_; }
  std::size_t vocabulary_size() const { return vocab_.size() + 2; }
  /// P(next | prev); "<s>" is a valid `prev`, "</s>" a valid `next`.
  double probability(std::string_view prev, std::string_view next) const;
  /// Count of bigrams starting at `prev`.
  std::uint64_t context_count(std::string_view prev) const;

 private:
  friend NgramLM train_lm(const std::vector<TokenList>& docs, double alpha);
  std::uint32_t id_of(std::string_view word) const;
  double probability_ids(std::uint32_t prev, std::uint32_t next) const;
  friend double perplexity(const NgramLM& lm, const TokenList& doc);

  // Ids: 0 <s>, 1 </s>, 2 <unk>, then words.
  std::unordered_map<std::string, std::uint32_t> vocab_;
  std::vector<std::uint64_t> context_;
  std::unordered_map<std::uint64_t, std::uint32_t> bigram_;
  double alpha_ = 1.0;
};

NgramLM train_lm(const std::vector<TokenList>& docs, double alpha = 1.0);

/// exp of the mean negative log bigram probability over n + 1 transitions.
double perplexity(const NgramLM& lm, const TokenList& doc);

/// Population coefficient of variation of sentence token counts; sentences
/// end at '.', '!' or '?'. One sentence gives 0.
double burstiness(std::string_view text);

/// Logistic model over (log perplexity, burstiness), features standardized
/// with the training mean and deviation.
struct Calibration {
  std::array<double, 2> mean{};
  std::array<double, 2> scale{1.0, 1.0};
  std::array<double, 2> weights{};
  double bias = 0.0;

  double p_ai(double perplexity, double burstiness) const;
};

/// Newton-fitted logistic regression; `is_ai` has one entry per feature pair.
Calibration fit_calibration(const std::vector<std::pair<double, double>>& features, const std::vector<int>& is_ai);

class BaselineDetector {
 public:
  BaselineDetector(NgramLM lm, Calibration calibration);

  /// Under 250 characters: NotRecognized. Otherwise round(100 * p_AI) banded.
  DetectorVerdict verdict(std::string_view text) const;
  std::pair<double, double> features(std::string_view text) const;

  const NgramLM& lm() const { return lm_; }
  const Calibration& calibration() const { return calibration_; }

 private:
  NgramLM lm_;
  Calibration calibration_;
};

/// Tokens the detector scores: lowercased words, stopwords kept.
TokenList detector_tokens(std::string_view text);

/// Trains the language model on every other human document of `train` and
/// fits the calibration on the remaining documents, so that the calibration
/// sees perplexities of text the model has not memorized.
BaselineDetector fit_baseline(const Corpus& train, double alpha = 1.0);

// ---------------------------------------------------------------------------
// External detector

struct ExternalDetectorConfig {
  std::string endpoint;  // http://host[:port]/path
  std::optional<std::filesystem::path> fixtures_dir;
  std::string api_key;  // never logged
  double timeout_seconds = 10.0;
  int max_retries = 2;
  int backoff_ms = 200;
  std::size_t max_parallel = 4;
};

/// key=value file (endpoint, fixtures_dir, timeout, retries, backoff_ms,
/// parallel); the API key comes from ATTRIBKIT_API_KEY only.
ExternalDetectorConfig load_detector_config(const std::optional<std::filesystem::path>& path);

/// Replaces every occurrence of `secret` with "[redacted]".
std::string redact(std::string text, const std::string& secret);

/// {"ai_percentage": n} or {"message": "..."}; anything else is a protocol error.
DetectorVerdict map_detector_response(std::string_view body);

/// Fixture mode reads <fixtures_dir>/<id>.json; otherwise POSTs {"text"}.
DetectorVerdict external_verdict(const ExternalDetectorConfig& config, const std::string& id, const std::string& text);

/// Up to max_parallel requests in flight; results keep input order.
std::vector<DetectorVerdict> external_verdicts(const ExternalDetectorConfig& config, const std::vector<std::string>& ids,
                                               const std::vector<std::string>& texts);

// ---------------------------------------------------------------------------
// Comparison report

struct DetectorRow {
  std::string name;
  /// Internal models only ever say Human or AI; other columns render "-".
  bool internal = false;
  std::array<std::size_t, 5> human{};  // true Human, counts per band in kAllBands order
  std::array<std::size_t, 5> llms{};   // true LLMs
  std::size_t correct = 0;
  std::size_t total = 0;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

struct ComparisonReport {
  std::vector<DetectorRow> rows;

  std::string to_markdown() const;
  std::string to_csv() const;
};

struct DetectorVerdicts {
  std::string name;
  bool internal = false;
  std::vector<DetectorVerdict> verdicts;
};

/// Correct means a Human verdict on human text or an AI verdict on LLM text;
/// Mix, DifferentResult and NotRecognized always count as wrong.
ComparisonReport compare(const std::vector<DetectorVerdicts>& detectors, const std::vector<Category>& truth);

/// Builds a row directly from contingency counts (used for published tables).
DetectorRow row_from_counts(std::string name, bool internal, const std::array<std::size_t, 5>& human,
                            const std::array<std::size_t, 5>& llms);

/// Internal model prediction as a verdict: class 0 is Human, anything else AI.
DetectorVerdict internal_verdict(std::size_t predicted_class, double p_llm);

}  // namespace attribkit
