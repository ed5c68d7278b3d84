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

#include "attribkit/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

namespace attribkit {

double SparseVector::at(std::uint32_t col) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), col);
  if (it == indices.end() || *it != col) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double SparseVector::dot(const SparseVector& other) const {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < indices.size() && j < other.indices.size()) {
    if (indices[i] == other.indices[j]) {
      s += values[i] * other.values[j];
      ++i;
      ++j;
    } else if (indices[i] < other.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double smoothed_idf(std::size_t n_train_docs, std::size_t df) {
  return std::log((1.0 + static_cast<double>(n_train_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> document_frequency,
                       std::size_t n_train_docs)
    : terms_(std::move(terms)), df_(std::move(document_frequency)), n_train_docs_(n_train_docs) {
  if (terms_.size() != df_.size()) fail(ErrorKind::Validation, "vocabulary terms and frequencies differ in length");
  if (!std::is_sorted(terms_.begin(), terms_.end()) ||
      std::adjacent_find(terms_.begin(), terms_.end()) != terms_.end())
    fail(ErrorKind::Validation, "vocabulary terms must be unique and lexicographically ordered");
  Fnv1a64 h;
  h.update(kTfidfVersion);
  h.update("\n" + std::to_string(n_train_docs_) + "\n");
  idf_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (df_[i] == 0 || df_[i] > n_train_docs_)
      fail(ErrorKind::Validation, "term '" + terms_[i] + "' has document frequency " + std::to_string(df_[i]) +
                                      " outside [1, " + std::to_string(n_train_docs_) + "]");
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
    idf_.push_back(smoothed_idf(n_train_docs_, df_[i]));
    h.update(terms_[i]);
    h.update("\t" + std::to_string(df_[i]) + "\n");
  }
  hash_ = h.hex();
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::to_table() const {
  std::string out = "# " + std::string(kTfidfVersion) + " n_train_docs=" + std::to_string(n_train_docs_) + "\n";
  out += "term\tindex\tdf\n";
  for (std::size_t i = 0; i < terms_.size(); ++i)
    out += terms_[i] + '\t' + std::to_string(i) + '\t' + std::to_string(df_[i]) + '\n';
  return out;
}

Vocabulary Vocabulary::from_table(std::string_view content, std::string_view source_name) {
  auto lines_left = content;
  auto next_line = [&]() -> std::optional<std::string_view> {
    if (lines_left.empty()) return std::nullopt;
    auto nl = lines_left.find('\n');
    auto line = lines_left.substr(0, nl);
    lines_left = nl == std::string_view::npos ? std::string_view{} : lines_left.substr(nl + 1);
    return line;
  };
  const std::string src(source_name);
  auto header = next_line();
  const std::string prefix = "# " + std::string(kTfidfVersion) + " n_train_docs=";
  if (!header || header->substr(0, prefix.size()) != prefix)
    fail(ErrorKind::Integrity, src + ": not a " + std::string(kTfidfVersion) + " vocabulary table");
  std::size_t n_docs = 0;
  {
    auto num = header->substr(prefix.size());
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), n_docs);
    if (ec != std::errc()) fail(ErrorKind::Parse, src + ": bad n_train_docs in header");
  }
  auto columns = next_line();
  if (!columns || *columns != "term\tindex\tdf") fail(ErrorKind::Parse, src + ": missing column header");

  std::vector<std::string> terms;
  std::vector<std::uint32_t> df;
  std::size_t line_no = 2;
  while (auto line = next_line()) {
    ++line_no;
    if (line->empty()) continue;
    const auto t1 = line->find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line->find('\t', t1 + 1);
    if (t2 == std::string_view::npos) fail(ErrorKind::Parse, src + ": line " + std::to_string(line_no) + " malformed");
    std::size_t index = 0;
    std::uint32_t freq = 0;
    auto idx_s = line->substr(t1 + 1, t2 - t1 - 1);
    auto df_s = line->substr(t2 + 1);
    auto r1 = std::from_chars(idx_s.data(), idx_s.data() + idx_s.size(), index);
    auto r2 = std::from_chars(df_s.data(), df_s.data() + df_s.size(), freq);
    if (r1.ec != std::errc() || r2.ec != std::errc() || index != terms.size())
      fail(ErrorKind::Parse, src + ": line " + std::to_string(line_no) + " has a bad index or df");
    terms.emplace_back(line->substr(0, t1));
    df.push_back(freq);
  }
  return Vocabulary(std::move(terms), std::move(df), n_docs);
}

void Vocabulary::save(const std::filesystem::path& path) const { write_file(path, to_table()); }

Vocabulary Vocabulary::load(const std::filesystem::path& path) { return from_table(read_file(path), path.string()); }

Vocabulary fit_vocabulary(const std::vector<TokenList>& train_docs, std::size_t min_df,
                          std::optional<std::size_t> max_features) {
  if (train_docs.empty()) fail(ErrorKind::Validation, "cannot fit a vocabulary on zero training documents");
  struct Stat {
    std::uint32_t df = 0;
    std::uint64_t total = 0;
  };
  std::map<std::string, Stat> stats;
  for (const auto& doc : train_docs) {
    std::vector<std::string_view> seen(doc.tokens.begin(), doc.tokens.end());
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i) {
      auto& s = stats[std::string(seen[i])];
      ++s.total;
      if (i == 0 || seen[i] != seen[i - 1]) ++s.df;
    }
  }
  std::vector<std::pair<std::string, Stat>> kept;
  for (auto& [term, s] : stats)
    if (s.df >= min_df) kept.emplace_back(term, s);
  if (max_features && kept.size() > *max_features) {
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.second.total > b.second.total; });
    kept.resize(*max_features);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  if (kept.empty())
    fail(ErrorKind::Validation, "vocabulary is empty after filtering (min_df=" + std::to_string(min_df) + ")");
  std::vector<std::string> terms;
  std::vector<std::uint32_t> df;
  for (auto& [term, s] : kept) {
    terms.push_back(term);
    df.push_back(s.df);
  }
  return Vocabulary(std::move(terms), std::move(df), train_docs.size());
}

SparseVector weight_counts(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& counts,
                           const Vocabulary& vocab) {
  SparseVector v;
  v.dimension = static_cast<std::uint32_t>(vocab.size());
  v.indices.reserve(counts.size());
  v.values.reserve(counts.size());
  double sq = 0.0;
  for (const auto& [index, count] : counts) {
    if (count == 0) continue;
    const double w = static_cast<double>(count) * vocab.idf()[index];
    v.indices.push_back(index);
    v.values.push_back(w);
    sq += w * w;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& x : v.values) x *= inv;
  }
  return v;
}

SparseVector transform(const TokenList& doc, const Vocabulary& vocab, TransformStats* stats) {
  std::vector<std::uint32_t> hits;
  hits.reserve(doc.tokens.size());
  std::size_t ignored = 0;
  for (const auto& t : doc.tokens) {
    if (auto idx = vocab.index_of(t))
      hits.push_back(*idx);
    else
      ++ignored;
  }
  if (stats) stats->ignored_tokens += ignored;
  std::sort(hits.begin(), hits.end());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;
  for (auto idx : hits) {
    if (!counts.empty() && counts.back().first == idx)
      ++counts.back().second;
    else
      counts.emplace_back(idx, 1);
  }
  return weight_counts(counts, vocab);
}

FeatureMatrix transform_batch_serial(const std::vector<TokenList>& docs, const Vocabulary& vocab,
                                     std::vector<int> labels, TransformStats* stats) {
  if (!labels.empty() && labels.size() != docs.size())
    fail(ErrorKind::Validation, "label count does not match document count");
  FeatureMatrix m;
  m.dimension = static_cast<std::uint32_t>(vocab.size());
  m.vocabulary_hash = vocab.hash();
  m.labels = std::move(labels);
  m.rows.reserve(docs.size());
  for (const auto& d : docs) m.rows.push_back(transform(d, vocab, stats));
  return m;
}

FeatureMatrix transform_batch(const std::vector<TokenList>& docs, const Vocabulary& vocab, std::vector<int> labels,
                              TransformStats* stats) {
  if (!labels.empty() && labels.size() != docs.size())
    fail(ErrorKind::Validation, "label count does not match document count");
  FeatureMatrix m;
  m.dimension = static_cast<std::uint32_t>(vocab.size());
  m.vocabulary_hash = vocab.hash();
  m.labels = std::move(labels);
  m.rows.resize(docs.size());
  std::vector<TransformStats> per_doc(docs.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    m.rows[k] = transform(docs[k], vocab, &per_doc[k]);
  }
  if (stats)
    for (const auto& s : per_doc) stats->ignored_tokens += s.ignored_tokens;
  return m;
}

std::vector<TermWeight> top_tfidf_terms(const FeatureMatrix& matrix, const Vocabulary& vocab, int class_label,
                                        std::size_t k) {
  std::vector<double> best(matrix.dimension, 0.0);
  bool any = false;
  for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
    if (matrix.labels.at(r) != class_label) continue;
    any = true;
    const auto& row = matrix.rows[r];
    for (std::size_t j = 0; j < row.nnz(); ++j) best[row.indices[j]] = std::max(best[row.indices[j]], row.values[j]);
  }
  if (!any) fail(ErrorKind::Validation, "class " + std::to_string(class_label) + " has no rows in the matrix");
  std::vector<std::uint32_t> order;
  for (std::uint32_t i = 0; i < best.size(); ++i)
    if (best[i] > 0.0) order.push_back(i);
  // indices are lexicographic, so index order breaks ties lexicographically
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return best[a] > best[b]; });
  if (order.size() > k) order.resize(k);
  std::vector<TermWeight> out;
  for (auto i : order) out.push_back({vocab.term(i), best[i]});
  return out;
}

}  // namespace attribkit
