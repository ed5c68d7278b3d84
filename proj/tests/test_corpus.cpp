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

#include <map>
#include <set>

#include "attribkit/corpus.hpp"
#include "attribkit/eval.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace attribkit;

TEST_SUITE("corpus") {
  TEST_CASE("kaggle row maps generated=0 to human") {
    const auto c = parse_kaggle_csv("id,prompt_id,text,generated\na1,0,\"Cars are...\",0\n");
    REQUIRE(c.size() == 1);
    CHECK(c.documents[0].id == "a1");
    CHECK(c.documents[0].prompt_id == 0);
    CHECK(c.documents[0].text == "Cars are...");
    CHECK(c.documents[0].category == Category::Human);
    CHECK(c.documents[0].subcategory == Subcategory::Human);
  }

  TEST_CASE("missing column is a schema error naming it") {
    const auto e = error_of([] { parse_kaggle_csv("id,prompt_id,generated\na,0,0\n"); });
    CHECK(e.kind == ErrorKind::Schema);
    CHECK(e.message.find("text") != std::string::npos);
  }

  TEST_CASE("malformed and empty rows") {
    CHECK(error_of([] { parse_kaggle_csv("id,prompt_id,text,generated\na,0,hi,7\n"); }).kind == ErrorKind::Parse);
    const auto e = error_of([] { parse_kaggle_csv("id,prompt_id,text,generated\na,0,hi\n"); });
    CHECK(e.kind == ErrorKind::Parse);
    CHECK(e.message.find("data row 1") != std::string::npos);
    CHECK(error_of([] { parse_kaggle_csv("id,prompt_id,text,generated\na,0,\"  \",0\n"); }).kind ==
          ErrorKind::Validation);
  }

  TEST_CASE("four-row fixture keeps file order") {
    const auto c = load_kaggle_csv(test_data("kaggle_small.csv"));
    REQUIRE(c.size() == 4);
    const std::vector<std::string> ids = {"a1", "a2", "b7", "c3"};
    for (std::size_t i = 0; i < 4; ++i) CHECK(c.documents[i].id == ids[i]);
    CHECK(c.documents[1].text == "The electoral college is an outdated system, \"some\" say.");
    CHECK(c.documents[2].category == Category::Llms);
    CHECK(c.documents[2].subcategory == Subcategory::Unknown);
    CHECK(c.documents[3].text == "Limiting car usage\nmakes streets quieter.");
    REQUIRE(c.source_manifest.size() == 1);
    CHECK(c.source_manifest[0].record_count == 4);
    CHECK(encode_labels(c, Task::Binary) == std::vector<int>{0, 0, 1, 0});
  }

  TEST_CASE("kaggle llm rows are refused for the multi task") {
    const auto c = load_kaggle_csv(test_data("kaggle_small.csv"));
    const auto e = error_of([&] { encode_labels(c, Task::Multi); });
    CHECK(e.kind == ErrorKind::Validation);
    CHECK(e.message.find("b7") != std::string::npos);
  }

  TEST_CASE("jsonl record with a tool label") {
    const auto c = parse_labeled_jsonl(
        R"({"id":"c1","prompt_id":1,"text":"Dear Senator...","category":"llms","subcategory":"llama"})");
    REQUIRE(c.size() == 1);
    CHECK(c.documents[0].category == Category::Llms);
    CHECK(c.documents[0].subcategory == Subcategory::Llama);
  }

  TEST_CASE("jsonl label errors") {
    auto e = error_of([] {
      parse_labeled_jsonl(R"({"id":"c1","prompt_id":1,"text":"x","category":"human","subcategory":"chatgpt"})");
    });
    CHECK(e.kind == ErrorKind::Validation);
    e = error_of([] {
      parse_labeled_jsonl(R"({"id":"c1","prompt_id":1,"text":"x","category":"llms","subcategory":"gemini"})");
    });
    CHECK(e.kind == ErrorKind::Validation);
    CHECK(e.message.find("perplexity") != std::string::npos);  // lists allowed values
  }

  TEST_CASE("jsonl unknown keys warn") {
    const auto c = parse_labeled_jsonl(
        R"({"id":"c1","prompt_id":1,"text":"x","category":"human","subcategory":"human","extra":3})");
    REQUIRE(c.source_manifest.size() == 1);
    CHECK_FALSE(c.source_manifest[0].warnings.empty());
  }

  TEST_CASE("synthetic binary corpus class counts") {
    const auto c = generate_synthetic(binary_preset(7));
    std::map<Subcategory, int> counts;
    for (const auto& d : c.documents) ++counts[d.subcategory];
    CHECK(counts[Subcategory::Human] == 300);
    for (auto s : {Subcategory::ChatGPT, Subcategory::Llama, Subcategory::Bard, Subcategory::Claude,
                   Subcategory::Perplexity})
      CHECK(counts[s] == 60);
    const auto back = parse_labeled_jsonl(to_labeled_jsonl(c));
    CHECK(back.documents == c.documents);
  }

  TEST_CASE("label encoding") {
    Document d{"x", 0, "t", Category::Llms, Subcategory::Claude};
    CHECK(encode_label(d, Task::Multi) == 4);
    CHECK(encode_label(d, Task::Binary) == 1);
    d = {"h", 0, "t", Category::Human, Subcategory::Human};
    CHECK(encode_label(d, Task::Binary) == 0);
    CHECK(encode_label(d, Task::Multi) == 0);

    const auto c = generate_synthetic(multi_preset(3));
    std::map<int, int> hist;
    for (int l : encode_labels(c, Task::Multi)) ++hist[l];
    CHECK(hist.size() == 6);
    for (const auto& [l, n] : hist) CHECK(n == 100);
    CHECK(encode_labels(c, Task::Multi) == encode_labels(c, Task::Multi));
  }

  TEST_CASE("label names are injective") {
    std::set<std::string> names;
    for (const auto& n : class_names(Task::Multi)) names.insert(n);
    CHECK(names.size() == 6);
  }

  TEST_CASE("split sizes, determinism and partition") {
    const auto c = generate_synthetic(binary_preset(11));
    const auto s = split(c, {0.2, 5, false});
    CHECK(s.test.size() == 120);
    CHECK(s.train.size() == 480);
    std::multiset<std::string> ids;
    for (const auto& d : s.train.documents) ids.insert(d.id);
    for (const auto& d : s.test.documents) ids.insert(d.id);
    CHECK(ids.size() == 600);
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 600);

    const auto again = split(c, {0.2, 5, false});
    CHECK(again.test.documents == s.test.documents);
    CHECK(split(c, {0.2, 6, false}).test.documents != s.test.documents);
  }

  TEST_CASE("stratified split of a balanced binary corpus") {
    Corpus c;
    for (int i = 0; i < 600; ++i) {
      const bool h = i < 300;
      c.documents.push_back({"d" + std::to_string(i), i % 2, "text",
                             h ? Category::Human : Category::Llms, h ? Subcategory::Human : Subcategory::ChatGPT});
    }
    const auto s = split(c, {0.2, 9, true});
    int human = 0;
    for (const auto& d : s.test.documents) human += d.category == Category::Human;
    CHECK(human == 60);
    CHECK(s.test.size() - human == 60);
  }

  TEST_CASE("split errors") {
    Corpus c;
    c.documents.push_back({"a", 0, "x", Category::Human, Subcategory::Human});
    c.documents.push_back({"b", 0, "y", Category::Human, Subcategory::Human});
    CHECK(error_of([&] { split(c, {0.1, 1, false}); }).kind == ErrorKind::Validation);
    CHECK(error_of([&] { split(c, {0.9, 1, false}); }).kind == ErrorKind::Validation);
    CHECK(error_of([&] { split(c, {1.0, 1, false}); }).kind == ErrorKind::Validation);
    CHECK(error_of([&] { split(Corpus{}, {0.2, 1, false}); }).kind == ErrorKind::Validation);
  }

  TEST_CASE("split_by_ids restores a recorded split") {
    const auto c = generate_synthetic(binary_preset(2));
    const auto s = split(c, {0.2, 1, false});
    std::vector<std::string> ids;
    for (const auto& d : s.test.documents) ids.push_back(d.id);
    const auto r = split_by_ids(c, ids);
    CHECK(r.test.documents == s.test.documents);
    CHECK(r.train.documents == s.train.documents);
  }

  TEST_CASE("duplicate ids across sources are rejected") {
    const auto a = parse_kaggle_csv("id,prompt_id,text,generated\nx,0,hello,0\n");
    CHECK(error_of([&] { merge({a, a}); }).kind == ErrorKind::Validation);
  }

  TEST_CASE("csv and jsonl round trips") {
    const auto c = generate_synthetic(binary_preset(4));
    const auto back = parse_labeled_jsonl(to_labeled_jsonl(c));
    CHECK(back.documents == c.documents);

    const auto k = load_kaggle_csv(test_data("kaggle_small.csv"));
    const auto k2 = parse_kaggle_csv(to_kaggle_csv(k));
    CHECK(k2.documents == k.documents);
  }
}
