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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "attribkit/preprocess.hpp"

namespace attribkit {

inline constexpr std::string_view kTfidfVersion = "tfidf-v1";

/// Sparse row with strictly increasing indices and positive values.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::uint32_t dimension = 0;

  std::size_t nnz() const { return indices.size(); }
  bool is_zero() const { return indices.empty(); }
  /// Value at column `col` (0 when absent); binary search.
  double at(std::uint32_t col) const;
  double norm() const;
  double dot(const SparseVector& other) const;

  bool operator==(const SparseVector&) const = default;
};

/// Term index fitted on training documents only. Indices are assigned in
/// lexicographic term order.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> document_frequency, std::size_t n_train_docs);

  std::size_t size() const { return terms_.size(); }
  std::size_t n_train_docs() const { return n_train_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint32_t>& document_frequency() const { return df_; }
  const std::vector<double>& idf() const { return idf_; }
  std::optional<std::uint32_t> index_of(std::string_view term) const;
  const std::string& term(std::uint32_t index) const { return terms_[index]; }
  /// Digest of version tag, document count, terms and frequencies.
  const std::string& hash() const { return hash_; }

  /// Text table: header line "# tfidf-v1 n_train_docs=N", then term<TAB>index<TAB>df.
  std::string to_table() const;
  static Vocabulary from_table(std::string_view content, std::string_view source_name = "<memory>");
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t n_train_docs_ = 0;
  std::string hash_;
};

/// Drops terms with df < min_df; with max_features, keeps the highest
/// total-count terms (ties lexicographic). Throws if nothing survives.
Vocabulary fit_vocabulary(const std::vector<TokenList>& train_docs, std::size_t min_df = 1,
                          std::optional<std::size_t> max_features = std::nullopt);

/// idf(t) = ln((1 + N) / (1 + df(t))) + 1.
double smoothed_idf(std::size_t n_train_docs, std::size_t df);

struct TransformStats {
  std::size_t ignored_tokens = 0;  // out-of-vocabulary tokens
};

/// Raw count times smoothed idf, L2-normalized. Out-of-vocabulary tokens are
/// ignored; an all-OOV document maps to the zero vector.
SparseVector transform(const TokenList& doc, const Vocabulary& vocab, TransformStats* stats = nullptr);

/// L2-normalized tf-idf row from per-term raw counts (index, count), indices ascending.
SparseVector weight_counts(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& counts,
                           const Vocabulary& vocab);

struct FeatureMatrix {
  std::vector<SparseVector> rows;
  std::vector<int> labels;
  std::uint32_t dimension = 0;
  std::string vocabulary_hash;

  std::size_t n_rows() const { return rows.size(); }
};

/// OpenMP-parallel across documents.
FeatureMatrix transform_batch(const std::vector<TokenList>& docs, const Vocabulary& vocab, std::vector<int> labels,
                              TransformStats* stats = nullptr);
/// Single-threaded reference for transform_batch.
FeatureMatrix transform_batch_serial(const std::vector<TokenList>& docs, const Vocabulary& vocab,
                                     std::vector<int> labels, TransformStats* stats = nullptr);

struct TermWeight {
  std::string term;
  double weight = 0.0;

  bool operator==(const TermWeight&) const = default;
};

/// Per term, the maximum weight over rows of `class_label`; descending, ties lexicographic.
std::vector<TermWeight> top_tfidf_terms(const FeatureMatrix& matrix, const Vocabulary& vocab, int class_label,
                                        std::size_t k);

}  // namespace attribkit
