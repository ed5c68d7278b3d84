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
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "attribkit/corpus.hpp"

namespace attribkit {

/// Version tag of the tokenize / stopword / lemmatize pipeline, recorded in model metadata.
inline constexpr std::string_view kPreprocessVersion = "pre-v1";

/// Lowercased, apostrophe-free word runs. Letters and digits of any script
/// count as word characters; everything else separates words.
std::vector<std::string> tokenize(std::string_view text);

/// Number of Unicode scalar values in a UTF-8 string (invalid bytes count as one each).
std::size_t utf8_length(std::string_view text);

class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(std::vector<std::string> words);

  /// The shipped English list (data/stopwords-en-v1.txt). Keeps "not" and "would".
  static const StopwordSet& english_v1();
  /// Plain text, one word per line, '#' starts a comment.
  static StopwordSet parse(std::string_view content);
  static StopwordSet load(const std::filesystem::path& path);

  bool contains(std::string_view w) const { return set_.count(std::string(w)) != 0; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  /// Digest over the sorted, deduplicated list.
  const std::string& hash() const { return hash_; }
  /// Canonical file rendering (header comment + sorted words).
  std::string to_file() const;

 private:
  std::vector<std::string> words_;
  std::unordered_set<std::string> set_;
  std::string hash_ = Fnv1a64{}.hex();
};

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const StopwordSet& stopwords);

/// Exception table for irregular forms, then suffix rules (-ies/-es/-s,
/// -ied/-ed/-ing with consonant undoubling and e-restoration). Rules are
/// applied until the word stops changing, so lemmatize_word is idempotent.
std::string lemmatize_word(std::string_view word);
std::vector<std::string> lemmatize(const std::vector<std::string>& tokens);

struct TokenList {
  std::string source_id;
  std::vector<std::string> tokens;

  bool operator==(const TokenList&) const = default;
};

/// tokenize -> drop stopwords -> lemmatize -> drop lemmas that are stopwords.
class Preprocessor {
 public:
  Preprocessor() : stopwords_(StopwordSet::english_v1()) {}
  explicit Preprocessor(StopwordSet stopwords) : stopwords_(std::move(stopwords)) {}

  TokenList process(std::string_view text, std::string source_id = {}) const;
  const StopwordSet& stopwords() const { return stopwords_; }

 private:
  StopwordSet stopwords_;
};

/// Processes every document; OpenMP-parallel across documents.
std::vector<TokenList> preprocess_corpus(const Preprocessor& pre, const Corpus& corpus);
/// Single-threaded reference for preprocess_corpus.
std::vector<TokenList> preprocess_corpus_serial(const Preprocessor& pre, const Corpus& corpus);

struct FrequencyEntry {
  std::string word;
  std::size_t count = 0;
  double percentage = 0.0;  // count / total tokens of the class * 100

  bool operator==(const FrequencyEntry&) const = default;
};

struct FrequencyTable {
  std::vector<FrequencyEntry> entries;
  std::size_t total_tokens = 0;
  std::size_t n_documents = 0;
};

/// Top-k words over the documents selected by `select` (indices into docs).
/// Descending by count, ties lexicographic. Throws if nothing matches.
FrequencyTable class_frequencies(const std::vector<TokenList>& docs, const std::function<bool(std::size_t)>& select,
                                 std::size_t top_k);

std::string frequency_csv(const FrequencyTable& table);

struct CloudWord {
  std::string word;
  double weight = 0.0;  // count / max count, in (0, 1]
};

std::vector<CloudWord> wordcloud_data(const FrequencyTable& table);

}  // namespace attribkit
