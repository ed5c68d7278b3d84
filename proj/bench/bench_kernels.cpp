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

// Times each OpenMP kernel against its serial twin on the seeded synthetic
// corpora and checks that both produce identical output.
//
//   bench_kernels [repeats] [jobs]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "attribkit/eval.hpp"
#include "attribkit/explain.hpp"
#include "attribkit/features.hpp"
#include "attribkit/model_io.hpp"
#include "attribkit/models.hpp"
#include "attribkit/parallel.hpp"
#include "attribkit/preprocess.hpp"

using namespace attribkit;

namespace {

int repeats = 3;

double median_seconds(const std::function<void()>& fn) {
  std::vector<double> t;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

bool all_identical = true;

template <typename T>
void row(const char* name, const std::function<T()>& serial, const std::function<T()>& parallel) {
  T s{}, p{};
  const double ts = median_seconds([&] { s = serial(); });
  const double tp = median_seconds([&] { p = parallel(); });
  const bool same = s == p;
  all_identical = all_identical && same;
  std::printf("%-22s %10.4f %10.4f %8.2fx  %s\n", name, ts, tp, tp > 0 ? ts / tp : 0.0, same ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) repeats = std::max(1, std::atoi(argv[1]));
  if (argc > 2) set_max_jobs(std::atoi(argv[2]));

  const auto corpus = generate_synthetic(multi_preset(kDefaultSeed));
  const Preprocessor pre;
  const auto docs = preprocess_corpus(pre, corpus);
  const auto vocab = fit_vocabulary(docs);
  const auto matrix = transform_batch(docs, vocab, encode_labels(corpus, Task::Multi));

  ForestParams fp;
  fp.n_trees = 50;
  BoostedParams bp;
  bp.n_rounds = 20;
  ModelMetadata meta;
  meta.kind = ModelKind::Forest;
  meta.task = Task::Multi;
  meta.class_names = class_names(Task::Multi);
  meta.vocabulary_hash = vocab.hash();
  meta.dimension = matrix.dimension;
  const Classifier clf(meta, train_forest(matrix, 6, fp));
  ExplainParams ep;
  ep.n_samples = 500;
  std::vector<TokenList> sample(docs.begin(), docs.begin() + 20);

  std::printf("%d documents, %zu terms, %d OpenMP threads, median of %d runs\n", static_cast<int>(corpus.size()),
              vocab.size(), omp_get_max_threads(), repeats);
  std::printf("%-22s %10s %10s %9s  %s\n", "kernel", "serial s", "parallel s", "speedup", "output");
  row<std::vector<TokenList>>("preprocess", [&] { return preprocess_corpus_serial(pre, corpus); },
                              [&] { return preprocess_corpus(pre, corpus); });
  row<std::vector<SparseVector>>("tfidf transform", [&] { return transform_batch_serial(docs, vocab, {}).rows; },
                                 [&] { return transform_batch(docs, vocab, {}).rows; });
  row<std::vector<ClassificationTree>>("forest training", [&] { return train_forest_serial(matrix, 6, fp).trees; },
                                       [&] { return train_forest(matrix, 6, fp).trees; });
  row<std::vector<RegressionTree>>("boosted training", [&] { return train_boosted_serial(matrix, 6, bp).trees; },
                                   [&] { return train_boosted(matrix, 6, bp).trees; });
  row<std::vector<std::vector<double>>>("batch prediction", [&] { return clf.predict_proba_batch_serial(matrix.rows); },
                                        [&] { return clf.predict_proba_batch(matrix.rows); });
  row<std::vector<WordWeight>>(
      "lime explanation",
      [&] {
        Rng rng(7);
        return explain_instance(clf, make_instance(docs[0], vocab), vocab, 0, ep, rng, false).weighted_words;
      },
      [&] {
        Rng rng(7);
        return explain_instance(clf, make_instance(docs[0], vocab), vocab, 0, ep, rng, true).weighted_words;
      });
  auto profile_words = [](const ClassProfile& p) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& e : p.entries) out.push_back({e.word, e.importance});
    return out;
  };
  row<std::vector<std::pair<std::string, double>>>(
      "class profile", [&] { return profile_words(class_profile_serial(clf, sample, vocab, 0, ep, 9)); },
      [&] { return profile_words(class_profile(clf, sample, vocab, 0, ep, 9)); });
  return all_identical ? 0 : 1;
}
