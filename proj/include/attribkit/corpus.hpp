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
#include <utility>
#include <vector>

#include "attribkit/common.hpp"

namespace attribkit {

enum class Category : std::uint8_t { Human = 0, Llms = 1 };

/// Source of a document. `Unknown` marks LLM essays whose generating tool
/// was not recorded (the Kaggle release only has a generated flag).
enum class Subcategory : std::uint8_t { Human = 0, ChatGPT, Llama, Bard, Claude, Perplexity, Unknown };

enum class Task : std::uint8_t { Binary, Multi };

inline constexpr std::array<std::string_view, 2> kBinaryClassNames = {"human", "llms"};
inline constexpr std::array<std::string_view, 6> kMultiClassNames = {"human",  "chatgpt", "llama",
                                                                      "bard", "claude",  "perplexity"};

std::string_view to_string(Category c);
std::string_view to_string(Subcategory s);
std::string_view to_string(Task t);
std::optional<Category> parse_category(std::string_view s);
std::optional<Subcategory> parse_subcategory(std::string_view s);
std::optional<Task> parse_task(std::string_view s);

/// Class names of a task in label order.
std::vector<std::string> class_names(Task task);

struct Document {
  std::string id;
  int prompt_id = 0;  // 0 = "Car-free cities", 1 = "Does the electoral college work?"
  std::string text;
  Category category = Category::Human;
  Subcategory subcategory = Subcategory::Human;

  bool operator==(const Document&) const = default;
};

struct SourceEntry {
  std::string path;
  std::size_t record_count = 0;
  std::vector<std::string> warnings;

  bool operator==(const SourceEntry&) const = default;
};

/// Immutable after construction; safe to share read-only between threads.
struct Corpus {
  std::vector<Document> documents;
  std::vector<SourceEntry> source_manifest;

  std::size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }
};

/// Checks every document invariant and id uniqueness; throws on the first violation.
void validate(const Corpus& corpus);

/// Kaggle essay release: columns id, prompt_id, text, generated (extra columns ignored).
Corpus load_kaggle_csv(const std::filesystem::path& path);
Corpus parse_kaggle_csv(std::string_view content, std::string_view source_name = "<memory>");

/// One JSON object per line with keys id, prompt_id, text, category, subcategory.
Corpus load_labeled_jsonl(const std::filesystem::path& path);
Corpus parse_labeled_jsonl(std::string_view content, std::string_view source_name = "<memory>");

/// Writes the JSONL carrier format; load_labeled_jsonl(save) reproduces the documents.
void save_labeled_jsonl(const Corpus& corpus, const std::filesystem::path& path);
std::string to_labeled_jsonl(const Corpus& corpus);

/// Writes the Kaggle schema (id, prompt_id, text, generated). Tool labels are lost.
std::string to_kaggle_csv(const Corpus& corpus);

/// Concatenates corpora. Duplicate ids across sources are rejected.
Corpus merge(std::vector<Corpus> parts);

/// Binary: human 0 / llms 1. Multi: human 0, chatgpt 1, llama 2, bard 3, claude 4, perplexity 5.
std::vector<int> encode_labels(const Corpus& corpus, Task task);
int encode_label(const Document& doc, Task task);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = kDefaultSeed;
  bool stratified = false;
};

struct SplitResult {
  Corpus train;
  Corpus test;
};

/// Test size is round(test_fraction * N). Unstratified: seeded uniform shuffle.
/// Stratified: per-class largest-remainder allocation over the finest known
/// label (subcategory, with Unknown as its own stratum). Both sides keep the
/// corpus order.
SplitResult split(const Corpus& corpus, const SplitSpec& spec);

/// Restores a split from recorded test ids.
SplitResult split_by_ids(const Corpus& corpus, const std::vector<std::string>& test_ids);

// RFC 4180 reader shared with the other CSV consumers.
std::vector<std::vector<std::string>> parse_csv(std::string_view content, std::string_view source_name);
std::string csv_escape(std::string_view field);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace attribkit
