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

#include <cmath>
#include <map>
#include <set>

#include "attribkit/eval.hpp"
#include "attribkit/features.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace attribkit;

namespace {

std::vector<TokenList> toy(std::vector<std::vector<std::string>> docs) {
  std::vector<TokenList> out;
  for (std::size_t i = 0; i < docs.size(); ++i) out.push_back({"d" + std::to_string(i), docs[i]});
  return out;
}

std::vector<TokenList> synthetic_docs(std::uint64_t seed) {
  return preprocess_corpus(Preprocessor{}, generate_synthetic(binary_preset(seed)));
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("vocabulary counts") {
    const auto v = fit_vocabulary(toy({{"a", "b"}, {"b", "c"}}));
    CHECK(v.size() == 3);
    CHECK(v.terms() == std::vector<std::string>{"a", "b", "c"});
    CHECK(v.document_frequency() == std::vector<std::uint32_t>{1, 2, 1});
    const auto v2 = fit_vocabulary(toy({{"a", "b"}, {"b", "c"}}), 2);
    CHECK(v2.terms() == std::vector<std::string>{"b"});
    CHECK(error_of([] { fit_vocabulary(toy({{"a"}, {"b"}}), 2); }).kind.has_value());
    CHECK(error_of([] { fit_vocabulary({}); }).kind.has_value());
  }

  TEST_CASE("max_features keeps the most frequent terms") {
    const auto v = fit_vocabulary(toy({{"z", "z", "z", "y", "y", "b"}, {"a", "b"}}), 1, 2);
    CHECK(v.terms() == std::vector<std::string>{"b", "z"});  // z:3, b:2 and y:2 tie, b wins lexicographically
  }

  TEST_CASE("document frequencies equal a brute-force recount") {
    const auto docs = synthetic_docs(21);
    const auto v = fit_vocabulary(docs);
    std::map<std::string, std::uint32_t> df;
    for (const auto& d : docs)
      for (const auto& t : std::set<std::string>(d.tokens.begin(), d.tokens.end())) ++df[t];
    REQUIRE(v.size() == df.size());
    std::size_t i = 0;
    for (const auto& [t, n] : df) {
      CHECK(v.term(static_cast<std::uint32_t>(i)) == t);
      CHECK(v.document_frequency()[i] == n);
      ++i;
    }
  }

  TEST_CASE("idf identities") {
    CHECK(smoothed_idf(5, 5) == 1.0);
    CHECK(smoothed_idf(3, 2) == doctest::Approx(std::log(4.0 / 3.0) + 1.0).epsilon(1e-15));
  }

  TEST_CASE("three-document hand example") {
    const auto docs = toy({{"a", "b"}, {"a"}, {"b", "b"}});
    const auto v = fit_vocabulary(docs);
    const double raw_b = 2.0 * smoothed_idf(3, 2);
    CHECK(raw_b == doctest::Approx(2.5754).epsilon(1e-4));
    const auto o = oracle::tfidf({{"a", "b"}, {"a"}, {"b", "b"}});
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto row = transform(docs[d], v);
      for (const auto& [t, w] : o.weights[d]) CHECK(std::abs(row.at(*v.index_of(t)) - w) <= 1e-12);
      CHECK(row.nnz() == o.weights[d].size());
    }
    // weight_counts agrees with transform
    CHECK(weight_counts({{0, 1}, {1, 1}}, v) == transform(docs[0], v));
  }

  TEST_CASE("rows are unit norm with sorted positive entries") {
    const auto docs = synthetic_docs(22);
    const auto v = fit_vocabulary(docs);
    for (const auto& d : docs) {
      const auto r = transform(d, v);
      CHECK(std::abs(r.norm() - 1.0) < 1e-9);
      for (std::size_t i = 0; i < r.nnz(); ++i) {
        CHECK(r.values[i] > 0.0);
        if (i) CHECK(r.indices[i] > r.indices[i - 1]);
      }
    }
  }

  TEST_CASE("out-of-vocabulary tokens are ignored and counted") {
    const auto v = fit_vocabulary(toy({{"a", "b"}}));
    TransformStats st;
    const auto r = transform({"x", {"a", "zzz", "qq"}}, v, &st);
    CHECK(st.ignored_tokens == 2);
    CHECK(r.nnz() == 1);
    const auto zero = transform({"y", {"nope"}}, v);
    CHECK(zero.is_zero());
    CHECK(zero.dimension == v.size());
  }

  TEST_CASE("no leakage from test documents") {
    auto docs = synthetic_docs(23);
    std::vector<TokenList> train(docs.begin(), docs.begin() + 400), test(docs.begin() + 400, docs.end());
    const auto v = fit_vocabulary(train);
    const auto before = transform_batch(test, v, std::vector<int>(test.size(), 0));
    test[0].tokens = {"entirely", "new", "words"};
    test[1].tokens.insert(test[1].tokens.end(), test[2].tokens.begin(), test[2].tokens.end());
    const auto after = transform_batch(test, v, std::vector<int>(test.size(), 0));
    for (std::size_t i = 2; i < test.size(); ++i) CHECK(after.rows[i] == before.rows[i]);
    CHECK(fit_vocabulary(train).hash() == v.hash());
  }

  TEST_CASE("vocabulary hash is deterministic and content-sensitive") {
    const auto docs = synthetic_docs(24);
    CHECK(fit_vocabulary(docs).hash() == fit_vocabulary(docs).hash());
    auto other = docs;
    other[0].tokens.push_back("extra");
    CHECK(fit_vocabulary(other).hash() != fit_vocabulary(docs).hash());
  }

  TEST_CASE("vocabulary table round trip") {
    const auto v = fit_vocabulary(synthetic_docs(25));
    const auto back = Vocabulary::from_table(v.to_table());
    CHECK(back.terms() == v.terms());
    CHECK(back.document_frequency() == v.document_frequency());
    CHECK(back.hash() == v.hash());
    CHECK(v.to_table().rfind("# tfidf-v1 n_train_docs=600", 0) == 0);
    CHECK(error_of([] { Vocabulary::from_table("garbage"); }).kind.has_value());
  }

  TEST_CASE("top terms equal a brute-force max scan") {
    const auto docs = synthetic_docs(26);
    const auto v = fit_vocabulary(docs);
    std::vector<int> labels;
    for (std::size_t i = 0; i < docs.size(); ++i) labels.push_back(docs[i].source_id.find("human") != std::string::npos ? 0 : 1);
    const auto m = transform_batch(docs, v, labels);
    for (int cls : {0, 1}) {
      std::map<std::string, double> best;
      for (std::size_t i = 0; i < m.n_rows(); ++i)
        if (labels[i] == cls)
          for (std::size_t k = 0; k < m.rows[i].nnz(); ++k) {
            auto& b = best[v.term(m.rows[i].indices[k])];
            b = std::max(b, m.rows[i].values[k]);
          }
      std::vector<std::pair<std::string, double>> ranked(best.begin(), best.end());
      std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) { return a.second > b.second; });
      const auto top = top_tfidf_terms(m, v, cls, 10);
      REQUIRE(top.size() == 10);
      for (std::size_t k = 0; k < 10; ++k) {
        CHECK(top[k].term == ranked[k].first);
        CHECK(top[k].weight == ranked[k].second);
      }
    }
    CHECK(top_tfidf_terms(m, v, 0, 100000).size() <= v.size());
    CHECK(error_of([&] { top_tfidf_terms(m, v, 5, 10); }).kind.has_value());
  }

  TEST_CASE("single-document class gives that document's top entries") {
    const auto docs = toy({{"a", "a", "b"}, {"c"}});
    const auto v = fit_vocabulary(docs);
    const auto m = transform_batch(docs, v, {0, 1});
    const auto top = top_tfidf_terms(m, v, 0, 10);
    REQUIRE(top.size() == 2);
    CHECK(top[0].term == "a");
    CHECK(top[0].weight == m.rows[0].at(0));
  }

  TEST_CASE("parallel transform equals serial") {
    const auto docs = synthetic_docs(27);
    const auto v = fit_vocabulary(docs);
    std::vector<int> labels(docs.size(), 0);
    TransformStats a, b;
    const auto p = transform_batch(docs, v, labels, &a);
    const auto s = transform_batch_serial(docs, v, labels, &b);
    CHECK(p.rows == s.rows);
    CHECK(a.ignored_tokens == b.ignored_tokens);
  }
}
