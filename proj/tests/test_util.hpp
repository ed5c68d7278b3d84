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
#include <optional>
#include <string>
#include <vector>

#include "attribkit/common.hpp"
#include "attribkit/eval.hpp"
#include "attribkit/features.hpp"
#include "attribkit/preprocess.hpp"

struct CaughtError {
  std::optional<attribkit::ErrorKind> kind;
  std::string message;
};

/// Runs `fn` and reports the attribkit::Error it throws, if any.
template <typename Fn>
CaughtError error_of(Fn&& fn) {
  try {
    fn();
  } catch (const attribkit::Error& e) {
    return {e.kind(), e.what()};
  }
  return {};
}

inline std::filesystem::path test_data(const std::string& name) {
  return std::filesystem::path(ATTRIBKIT_TEST_DATA) / name;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("attribkit-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline attribkit::SparseVector to_sparse(const std::vector<double>& dense) {
  attribkit::SparseVector v;
  v.dimension = static_cast<std::uint32_t>(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) {
      v.indices.push_back(static_cast<std::uint32_t>(i));
      v.values.push_back(dense[i]);
    }
  return v;
}

inline attribkit::FeatureMatrix to_matrix(const std::vector<std::vector<double>>& dense, std::vector<int> labels) {
  attribkit::FeatureMatrix m;
  m.dimension = dense.empty() ? 0 : static_cast<std::uint32_t>(dense[0].size());
  for (const auto& r : dense) m.rows.push_back(to_sparse(r));
  m.labels = std::move(labels);
  return m;
}

/// Random non-negative dense rows; about 30% zeros, values on a 0.05 grid so
/// that ties between rows occur.
inline std::vector<std::vector<double>> random_rows(attribkit::Rng& rng, std::size_t n, std::size_t p) {
  std::vector<std::vector<double>> x(n, std::vector<double>(p, 0.0));
  for (auto& row : x)
    for (auto& v : row)
      if (!attribkit::bernoulli(rng, 0.3)) v = 0.05 * static_cast<double>(1 + attribkit::uniform_index(rng, 20));
  return x;
}

/// A synthetic corpus run through split, preprocessing and tf-idf.
struct Featurized {
  attribkit::Corpus train_docs, test_docs;
  std::vector<attribkit::TokenList> train_tokens, test_tokens;
  attribkit::Vocabulary vocab;
  attribkit::FeatureMatrix train, test;
};

inline Featurized featurize(const attribkit::Corpus& corpus, attribkit::Task task, std::uint64_t seed,
                            double test_fraction = 0.2) {
  using namespace attribkit;
  Featurized f;
  auto s = split(corpus, {test_fraction, derive_seed(seed, "split"), false});
  f.train_docs = std::move(s.train);
  f.test_docs = std::move(s.test);
  const Preprocessor pre;
  f.train_tokens = preprocess_corpus(pre, f.train_docs);
  f.test_tokens = preprocess_corpus(pre, f.test_docs);
  f.vocab = fit_vocabulary(f.train_tokens);
  f.train = transform_batch(f.train_tokens, f.vocab, encode_labels(f.train_docs, task));
  f.test = transform_batch(f.test_tokens, f.vocab, encode_labels(f.test_docs, task));
  return f;
}

/// Fraction of rows whose argmax matches the label.
template <typename Model>
double accuracy_of(const Model& m, const attribkit::FeatureMatrix& x) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < x.n_rows(); ++i)
    ok += static_cast<int>(attribkit::argmax(m.predict_proba(x.rows[i]))) == x.labels[i];
  return static_cast<double>(ok) / static_cast<double>(x.n_rows());
}
