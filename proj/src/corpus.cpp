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

#include "attribkit/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace attribkit {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(Category c) { return kBinaryClassNames[static_cast<int>(c)]; }

std::string_view to_string(Subcategory s) {
  if (s == Subcategory::Unknown) return "unknown";
  return kMultiClassNames[static_cast<int>(s)];
}

std::string_view to_string(Task t) { return t == Task::Binary ? "binary" : "multi"; }

std::optional<Category> parse_category(std::string_view s) {
  const auto l = lower(trim(s));
  if (l == "human") return Category::Human;
  if (l == "llms" || l == "llm") return Category::Llms;
  return std::nullopt;
}

std::optional<Subcategory> parse_subcategory(std::string_view s) {
  const auto l = lower(trim(s));
  for (std::size_t i = 0; i < kMultiClassNames.size(); ++i)
    if (l == kMultiClassNames[i]) return static_cast<Subcategory>(i);
  return std::nullopt;
}

std::optional<Task> parse_task(std::string_view s) {
  const auto l = lower(trim(s));
  if (l == "binary") return Task::Binary;
  if (l == "multi") return Task::Multi;
  return std::nullopt;
}

std::vector<std::string> class_names(Task task) {
  std::vector<std::string> out;
  if (task == Task::Binary)
    for (auto n : kBinaryClassNames) out.emplace_back(n);
  else
    for (auto n : kMultiClassNames) out.emplace_back(n);
  return out;
}

// ---------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "failed reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::Io, "cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::vector<std::vector<std::string>> parse_csv(std::string_view content, std::string_view source_name) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;
  std::size_t row_start_line = 1;

  if (content.size() >= 3 && content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  auto malformed = [&](const std::string& why) {
    fail(ErrorKind::Parse, std::string(source_name) + ": malformed CSV record starting at line " +
                               std::to_string(row_start_line) + ": " + why);
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) malformed("stray quote inside unquoted field");
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_row();
        ++line;
        row_start_line = line;
        break;
      default:
        if (field_was_quoted) malformed("characters after closing quote");
        field.push_back(c);
    }
  }
  if (in_quotes) malformed("unterminated quoted field");
  if (!field.empty() || !row.empty() || field_was_quoted) end_row();
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// ---------------------------------------------------------------------------

void validate(const Corpus& corpus) {
  std::unordered_set<std::string_view> seen;
  for (const auto& d : corpus.documents) {
    if (d.id.empty()) fail(ErrorKind::Validation, "document with empty id");
    if (!seen.insert(d.id).second) fail(ErrorKind::Validation, "duplicate document id '" + d.id + "'");
    if (trim(d.text).empty()) fail(ErrorKind::Validation, "document '" + d.id + "' has empty text");
    if (d.prompt_id != 0 && d.prompt_id != 1)
      fail(ErrorKind::Validation, "document '" + d.id + "' has prompt_id " + std::to_string(d.prompt_id) +
                                      " (expected 0 or 1)");
    const bool human_cat = d.category == Category::Human;
    const bool human_sub = d.subcategory == Subcategory::Human;
    if (human_cat != human_sub)
      fail(ErrorKind::Validation, "document '" + d.id + "' has inconsistent labels: category " +
                                      std::string(to_string(d.category)) + " with subcategory " +
                                      std::string(to_string(d.subcategory)));
  }
}

Corpus parse_kaggle_csv(std::string_view content, std::string_view source_name) {
  auto rows = parse_csv(content, source_name);
  if (rows.empty()) fail(ErrorKind::Schema, std::string(source_name) + ": missing header row");
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (lower(trim(header[i])) == name) return i;
    fail(ErrorKind::Schema, std::string(source_name) + ": missing required column '" + std::string(name) + "'");
  };
  const std::size_t c_id = column("id");
  const std::size_t c_prompt = column("prompt_id");
  const std::size_t c_text = column("text");
  const std::size_t c_gen = column("generated");

  Corpus corpus;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = std::string(source_name) + ": data row " + std::to_string(r);
    if (row.size() != header.size())
      fail(ErrorKind::Parse, where + ": expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(row.size()));
    Document d;
    d.id = std::string(trim(row[c_id]));
    const auto prompt = parse_int(row[c_prompt]);
    if (!prompt) fail(ErrorKind::Parse, where + ": prompt_id '" + row[c_prompt] + "' is not an integer");
    d.prompt_id = static_cast<int>(*prompt);
    d.text = row[c_text];
    const auto gen = parse_int(row[c_gen]);
    if (!gen || (*gen != 0 && *gen != 1))
      fail(ErrorKind::Parse, where + ": generated '" + row[c_gen] + "' is not 0 or 1");
    if (trim(d.text).empty()) fail(ErrorKind::Validation, where + ": empty text for id '" + d.id + "'");
    d.category = *gen == 0 ? Category::Human : Category::Llms;
    d.subcategory = *gen == 0 ? Subcategory::Human : Subcategory::Unknown;
    corpus.documents.push_back(std::move(d));
  }
  corpus.source_manifest.push_back({std::string(source_name), corpus.documents.size(), {}});
  validate(corpus);
  return corpus;
}

Corpus load_kaggle_csv(const std::filesystem::path& path) { return parse_kaggle_csv(read_file(path), path.string()); }

Corpus parse_labeled_jsonl(std::string_view content, std::string_view source_name) {
  static const std::set<std::string> kKnownKeys = {"id", "prompt_id", "text", "category", "subcategory"};
  Corpus corpus;
  SourceEntry entry{std::string(source_name), 0, {}};
  std::set<std::string> warned;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const auto line = trim(content.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = std::string(source_name) + ": line " + std::to_string(line_no);

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::Parse, where + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) fail(ErrorKind::Parse, where + ": record is not a JSON object");
    for (const auto& key : kKnownKeys)
      if (!j.contains(key)) fail(ErrorKind::Schema, where + ": missing key '" + key + "'");
    for (const auto& [key, _] : j.items())
      if (!kKnownKeys.count(key) && warned.insert(key).second)
        entry.warnings.push_back("unknown key '" + key + "' ignored (first seen at line " + std::to_string(line_no) +
                                 ")");

    Document d;
    try {
      d.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      d.prompt_id = j.at("prompt_id").get<int>();
      d.text = j.at("text").get<std::string>();
      const auto cat = j.at("category").get<std::string>();
      const auto sub = j.at("subcategory").get<std::string>();
      const auto pc = parse_category(cat);
      if (!pc) fail(ErrorKind::Validation, where + ": unknown category '" + cat + "' (allowed: human, llms)");
      const auto ps = parse_subcategory(sub);
      if (!ps)
        fail(ErrorKind::Validation, where + ": unknown subcategory '" + sub +
                                        "' (allowed: human, chatgpt, llama, bard, claude, perplexity)");
      d.category = *pc;
      d.subcategory = *ps;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Parse, where + ": wrong field type (" + e.what() + ")");
    }
    if (trim(d.text).empty()) fail(ErrorKind::Validation, where + ": empty text for id '" + d.id + "'");
    if ((d.category == Category::Human) != (d.subcategory == Subcategory::Human))
      fail(ErrorKind::Validation, where + ": category '" + std::string(to_string(d.category)) +
                                      "' is inconsistent with subcategory '" + std::string(to_string(d.subcategory)) +
                                      "'");
    corpus.documents.push_back(std::move(d));
  }
  entry.record_count = corpus.documents.size();
  corpus.source_manifest.push_back(std::move(entry));
  validate(corpus);
  return corpus;
}

Corpus load_labeled_jsonl(const std::filesystem::path& path) {
  return parse_labeled_jsonl(read_file(path), path.string());
}

std::string to_labeled_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents) {
    if (d.subcategory == Subcategory::Unknown)
      fail(ErrorKind::Validation, "document '" + d.id + "' has no tool label; the JSONL carrier requires one");
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["prompt_id"] = d.prompt_id;
    j["text"] = d.text;
    j["category"] = to_string(d.category);
    j["subcategory"] = to_string(d.subcategory);
    out += j.dump();
    out += '\n';
  }
  return out;
}

void save_labeled_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, to_labeled_jsonl(corpus));
}

std::string to_kaggle_csv(const Corpus& corpus) {
  std::string out = "id,prompt_id,text,generated\n";
  for (const auto& d : corpus.documents) {
    out += csv_escape(d.id) + ',' + std::to_string(d.prompt_id) + ',' + csv_escape(d.text) + ',' +
           (d.category == Category::Human ? "0" : "1") + '\n';
  }
  return out;
}

Corpus merge(std::vector<Corpus> parts) {
  Corpus out;
  std::map<std::string, std::string> origin;
  for (auto& part : parts) {
    const std::string src = part.source_manifest.empty() ? "<unnamed>" : part.source_manifest.front().path;
    for (auto& d : part.documents) {
      auto [it, inserted] = origin.emplace(d.id, src);
      if (!inserted)
        fail(ErrorKind::Validation, "duplicate id '" + d.id + "' in '" + src + "' (already loaded from '" +
                                        it->second + "')");
      out.documents.push_back(std::move(d));
    }
    for (auto& e : part.source_manifest) out.source_manifest.push_back(std::move(e));
  }
  return out;
}

int encode_label(const Document& doc, Task task) {
  if (task == Task::Binary) return doc.category == Category::Human ? 0 : 1;
  if (doc.subcategory == Subcategory::Unknown)
    fail(ErrorKind::Validation, "document '" + doc.id +
                                    "' has no tool label; multi-class tasks need the labeled JSONL carrier");
  return static_cast<int>(doc.subcategory);
}

std::vector<int> encode_labels(const Corpus& corpus, Task task) {
  std::vector<int> labels;
  labels.reserve(corpus.size());
  for (const auto& d : corpus.documents) labels.push_back(encode_label(d, task));
  return labels;
}

namespace {

SplitResult assemble(const Corpus& corpus, const std::vector<bool>& in_test) {
  SplitResult r;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    (in_test[i] ? r.test : r.train).documents.push_back(corpus.documents[i]);
  r.train.source_manifest = corpus.source_manifest;
  r.test.source_manifest = corpus.source_manifest;
  return r;
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace

SplitResult split(const Corpus& corpus, const SplitSpec& spec) {
  if (corpus.empty()) fail(ErrorKind::Validation, "cannot split an empty corpus");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    fail(ErrorKind::Validation, "test fraction must lie strictly between 0 and 1");
  const std::size_t n = corpus.size();
  const auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test == n)
    fail(ErrorKind::Validation, "test fraction " + std::to_string(spec.test_fraction) + " on " + std::to_string(n) +
                                    " documents leaves an empty " + (n_test == 0 ? "test" : "train") + " side");

  Rng rng(spec.seed);
  std::vector<bool> in_test(n, false);
  if (!spec.stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    for (std::size_t i = 0; i < n_test; ++i) in_test[order[i]] = true;
    return assemble(corpus, in_test);
  }

  // Group by finest known label, allocate floor shares, hand out the
  // remainder by largest fractional part (ties to the lower stratum).
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) strata[static_cast<int>(corpus.documents[i].subcategory)].push_back(i);
  struct Share {
    int key;
    std::size_t base;
    double frac;
  };
  std::vector<Share> shares;
  std::size_t assigned = 0;
  for (const auto& [key, members] : strata) {
    const double exact = spec.test_fraction * static_cast<double>(members.size());
    const auto base = static_cast<std::size_t>(std::floor(exact));
    shares.push_back({key, base, exact - static_cast<double>(base)});
    assigned += base;
  }
  std::vector<std::size_t> by_frac(shares.size());
  std::iota(by_frac.begin(), by_frac.end(), 0);
  std::stable_sort(by_frac.begin(), by_frac.end(),
                   [&](std::size_t a, std::size_t b) { return shares[a].frac > shares[b].frac; });
  for (std::size_t k = 0; assigned < n_test && k < by_frac.size(); ++k, ++assigned) ++shares[by_frac[k]].base;

  for (const auto& share : shares) {
    auto members = strata[share.key];
    shuffle(members, rng);
    for (std::size_t i = 0; i < share.base && i < members.size(); ++i) in_test[members[i]] = true;
  }
  return assemble(corpus, in_test);
}

SplitResult split_by_ids(const Corpus& corpus, const std::vector<std::string>& test_ids) {
  std::unordered_set<std::string> wanted(test_ids.begin(), test_ids.end());
  std::vector<bool> in_test(corpus.size(), false);
  std::size_t found = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (wanted.count(corpus.documents[i].id)) {
      in_test[i] = true;
      ++found;
    }
  if (found != wanted.size())
    fail(ErrorKind::Validation, "recorded split lists " + std::to_string(wanted.size()) + " test ids but only " +
                                    std::to_string(found) + " are present in the corpus");
  return assemble(corpus, in_test);
}

}  // namespace attribkit
