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

#include "attribkit/preprocess.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace attribkit {

// ---------------------------------------------------------------------------
// UTF-8 tokenization

namespace {

constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one scalar at `i`, advancing it. Invalid sequences yield U+FFFD and consume one byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kReplacement;
  }
  if (i + static_cast<std::size_t>(len) > s.size()) {
    ++i;
    return kReplacement;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return kReplacement;
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019 || cp == 0x02BC; }

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

// Coarse letter/digit classification without a Unicode database: ASCII
// alphanumerics, plus everything outside the punctuation, symbol, space,
// emoji and private-use blocks.
bool is_word_char(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  if (cp == kReplacement) return false;
  if (in(cp, 0x80, 0xBF)) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (in(cp, 0x2B0, 0x2FF)) return false;
  if (cp == 0x37E || cp == 0x387) return false;
  if (in(cp, 0x2000, 0x2BFF) || in(cp, 0x2E00, 0x2E7F) || in(cp, 0x3000, 0x303F)) return false;
  if (in(cp, 0xE000, 0xF8FF) || in(cp, 0xFE30, 0xFE4F) || cp == 0xFEFF) return false;
  if (in(cp, 0xFF01, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65))
    return false;
  if (in(cp, 0x1F000, 0x1FAFF)) return false;
  return true;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0xC0) return cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return (cp % 2 == 0) ? cp + 1 : cp;
  if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (in(cp, 0x391, 0x3AB) && cp != 0x3A2) return cp + 0x20;
  if (in(cp, 0x410, 0x42F)) return cp + 0x20;
  if (in(cp, 0x400, 0x40F)) return cp + 0x50;
  return cp;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = decode_utf8(text, i);
    if (is_apostrophe(cp)) continue;  // stripped, does not break the run
    if (is_word_char(cp))
      encode_utf8(to_lower(cp), current);
    else
      flush();
  }
  flush();
  return tokens;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size(); ++n) decode_utf8(text, i);
  return n;
}

// ---------------------------------------------------------------------------
// Stopwords

namespace {

// English function words. Deliberately absent: not, would, do/does/did,
// much, many, say, get, go, also, less, several, without, upon.
constexpr std::string_view kEnglishV1[] = {
    "a",        "about",   "above",   "after",      "again",  "against", "ain",       "all",      "am",
    "an",       "and",     "any",     "are",        "aren",   "arent",   "as",        "at",       "be",
    "because",  "been",    "before",  "being",      "below",  "between", "both",      "but",      "by",
    "can",      "cant",    "could",   "couldn",     "couldnt", "d",      "didn",      "didnt",    "doesn",
    "doesnt",   "don",     "dont",    "down",       "during", "each",    "either",    "few",      "for",
    "from",     "further", "had",     "hadn",       "hadnt",  "has",     "hasn",      "hasnt",    "have",
    "haven",    "havent",  "having",  "he",         "her",    "here",    "heres",     "hers",     "herself",
    "him",      "himself", "his",     "how",        "i",      "id",      "if",        "im",       "in",
    "into",     "is",      "isn",     "isnt",       "it",     "its",     "itself",    "ive",      "just",
    "ll",       "m",       "may",     "me",         "might",  "mightn",  "more",      "most",     "must",
    "mustn",    "my",      "myself",  "needn",      "neither", "no",     "nor",       "now",      "o",
    "of",       "off",     "on",      "once",       "only",   "or",      "other",     "our",      "ours",
    "ourselves", "out",    "over",    "own",        "re",     "s",       "same",      "shall",    "shan",
    "she",      "should",  "shouldn", "shouldnt",   "so",     "some",    "such",      "t",        "than",
    "that",     "thats",   "the",     "their",      "theirs", "them",    "themselves", "then",    "there",
    "theres",   "these",   "they",    "theyre",     "theyve", "this",    "those",     "through",  "to",
    "too",      "under",   "until",   "up",         "us",     "ve",      "very",      "was",      "wasn",
    "wasnt",    "we",      "were",    "weren",      "werent", "weve",    "what",      "whats",    "when",
    "where",    "which",   "while",   "who",        "whom",   "why",     "will",      "with",     "won",
    "wont",     "wouldn",  "wouldnt", "y",          "you",    "youll",   "your",      "youre",    "yours",
    "yourself", "yourselves", "youve",
};

}  // namespace

StopwordSet::StopwordSet(std::vector<std::string> words) {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  words_ = std::move(words);
  set_.insert(words_.begin(), words_.end());
  Fnv1a64 h;
  h.update("stopwords\n");
  for (const auto& w : words_) {
    h.update(w);
    h.update("\n");
  }
  hash_ = h.hex();
}

const StopwordSet& StopwordSet::english_v1() {
  static const StopwordSet set = [] {
    std::vector<std::string> words;
    for (auto w : kEnglishV1) words.emplace_back(w);
    return StopwordSet(std::move(words));
  }();
  return set;
}

StopwordSet StopwordSet::parse(std::string_view content) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    auto line = content.substr(pos, nl - pos);
    pos = nl + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    // Entries go through the tokenizer so they match what the pipeline produces.
    for (auto& t : tokenize(line)) words.push_back(std::move(t));
  }
  return StopwordSet(std::move(words));
}

StopwordSet StopwordSet::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::string StopwordSet::to_file() const {
  std::string out = "# attribkit stopword list, one word per line\n";
  for (const auto& w : words_) out += w + '\n';
  return out;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const StopwordSet& stopwords) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!stopwords.contains(t)) out.push_back(t);
  return out;
}

// ---------------------------------------------------------------------------
// Lemmatization

namespace {

struct LemmaTables {
  std::unordered_map<std::string, std::string> exceptions;
  std::unordered_map<std::string, bool> keep;  // look inflected, are not
};

const LemmaTables& lemma_tables() {
  static const LemmaTables tables = [] {
    LemmaTables t;
    auto map = [&t](std::string_view lemma, std::initializer_list<std::string_view> forms) {
      for (auto f : forms) t.exceptions.emplace(std::string(f), std::string(lemma));
    };
    map("be", {"am", "is", "are", "was", "were", "been", "being"});
    map("have", {"has", "had", "having"});
    map("do", {"does", "did", "done", "doing"});
    map("go", {"goes", "went", "gone", "going"});
    map("say", {"says", "said"});
    map("get", {"got", "gotten", "getting"});
    map("make", {"made"});
    map("take", {"took", "taken"});
    map("give", {"gave", "given"});
    map("come", {"came"});
    map("become", {"became"});
    map("begin", {"began", "begun", "beginning"});
    map("know", {"knew", "known"});
    map("think", {"thought"});
    map("buy", {"bought"});
    map("bring", {"brought"});
    map("run", {"ran"});
    map("see", {"saw", "seen"});
    map("write", {"wrote", "written", "writing", "writes"});
    map("choose", {"chose", "chosen"});
    map("drive", {"drove", "driven"});
    map("feel", {"felt"});
    map("find", {"found"});
    map("hold", {"held"});
    map("keep", {"kept"});
    map("lose", {"lost"});
    map("mean", {"meant"});
    map("meet", {"met"});
    map("pay", {"paid"});
    map("send", {"sent"});
    map("spend", {"spent"});
    map("stand", {"stood"});
    map("understand", {"understood"});
    map("tell", {"told"});
    map("teach", {"taught"});
    map("win", {"won"});
    map("lead", {"led"});
    map("build", {"built"});
    map("speak", {"spoke", "spoken"});
    map("grow", {"grew", "grown"});
    map("fall", {"fell", "fallen"});
    map("rise", {"rose", "risen"});
    map("break", {"broke", "broken"});
    map("forget", {"forgot", "forgotten"});
    map("agree", {"agreed", "agrees", "agreeing"});
    map("die", {"died", "dies", "dying"});
    map("lie", {"lied", "lies", "lying"});
    map("tie", {"tied", "ties", "tying"});
    map("use", {"used", "uses", "using"});
    map("child", {"children"});
    map("man", {"men"});
    map("woman", {"women"});
    map("person", {"persons"});
    map("foot", {"feet"});
    map("tooth", {"teeth"});
    map("mouse", {"mice"});
    map("life", {"lives"});
    map("wife", {"wives"});
    map("knife", {"knives"});
    map("half", {"halves"});
    map("shelf", {"shelves"});
    map("wolf", {"wolves"});
    map("leave", {"leaves", "leaving"});
    map("movie", {"movies"});
    map("shoe", {"shoes"});
    map("datum", {"data"});
    map("criterion", {"criteria"});
    map("phenomenon", {"phenomena"});
    map("analysis", {"analyses"});
    map("crisis", {"crises"});
    map("bus", {"buses"});
    // Verbs the suffix rules cannot restore correctly.
    for (std::string_view base : {"cause", "change", "arrange", "range", "exchange", "challenge", "invite",
                                  "explore", "ignore", "restore", "store", "score", "implore", "adore", "excite",
                                  "unite", "abuse", "accuse", "refuse", "amuse", "pause", "create", "promote"}) {
      const std::string stem(base.substr(0, base.size() - 1));
      map(base, {stem + "ed", stem + "ing", std::string(base) + "s"});
    }
    for (std::string_view base : {"treat", "heat", "seat", "beat", "repeat", "defeat", "cheat", "float", "eat",
                                  "threat", "greet", "meet", "sweat"}) {
      const std::string b(base);
      map(base, {b + "ed", b + "ing", b + "s"});
    }
    for (std::string_view w :
         {"this",     "thus",     "always",    "perhaps",   "whereas",  "news",      "series",   "species",
          "politics", "economics", "physics",  "mathematics", "ethics", "athletics", "statistics", "texas",
          "kansas",   "christmas", "atlas",    "canvas",    "gas",      "alias",     "lens",     "during",
          "morning",  "evening",  "nothing",   "something", "anything", "everything", "ceiling", "sibling",
          "darling",  "hundred",  "sacred",    "naked",     "wicked",   "kindred",   "embed",    "beloved",
          "united",   "bias",     "means",     "ones",      "yes",      "upon"}) {
      t.keep.emplace(std::string(w), true);
    }
    return t;
  }();
  return tables;
}

bool is_ascii_lower_word(std::string_view w) {
  return std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

bool is_vowel_at(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return true;
    case 'y':
      return i > 0 && !is_vowel_at(w, i - 1);
    default:
      return false;
  }
}

bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i)
    if (is_vowel_at(w, i)) return true;
  return false;
}

/// Number of vowel-consonant sequences.
int measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel_at(w, i);
    if (prev_vowel && !v) ++m;
    prev_vowel = v;
  }
  return m;
}

/// Ends consonant-vowel-consonant, last consonant not w/x/y.
bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return !is_vowel_at(w, n - 3) && is_vowel_at(w, n - 2) && !is_vowel_at(w, n - 1) && last != 'w' && last != 'x' &&
         last != 'y';
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool is_consonant_char(char c) { return c >= 'a' && c <= 'z' && std::string_view("aeiouy").find(c) == std::string_view::npos; }

/// Repairs a stem left after removing -ed / -ing.
std::string fix_stem(std::string stem) {
  const std::size_t n = stem.size();
  const char last = stem[n - 1];
  const char prev = n >= 2 ? stem[n - 2] : '\0';
  const char prev2 = n >= 3 ? stem[n - 3] : '\0';
  if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
  if (n >= 4 && last == prev && is_consonant_char(last) && last != 'l' && last != 's' && last != 'z') {
    stem.pop_back();
    return stem;
  }
  if (last == 'v' || last == 'u' || last == 'c') return stem + "e";
  if (last == 's' && (prev == 'a' || prev == 'e' || prev == 'i' || prev == 'o')) return stem + "e";
  if (last == 'z' && (prev == 'a' || prev == 'e' || prev == 'o' || prev == 'u')) return stem + "e";
  if ((last == 'd' && (prev == 'i' || prev == 'u')) && is_consonant_char(prev2)) return stem + "e";
  if (last == 'r' && (prev == 'u' || prev == 'i' || prev == 'a') && (is_consonant_char(prev2) || (prev == 'i' && prev2 == 'u')))
    return stem + "e";
  if (n >= 2 && prev == 'r' && (last == 'g' || last == 's')) return stem + "e";
  if (n >= 2 && last == 's' && (prev == 'n' || prev == 'p')) return stem + "e";
  if (ends_with(stem, "dg")) return stem + "e";
  if (n >= 5 && (ends_with(stem, "ang") || ends_with(stem, "eng"))) return stem + "e";
  if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
  return stem;
}

std::string apply_rules_once(const std::string& w) {
  const auto& tables = lemma_tables();
  if (auto it = tables.exceptions.find(w); it != tables.exceptions.end()) return it->second;
  if (w.size() <= 3 || !is_ascii_lower_word(w) || tables.keep.count(w)) return w;
  const std::string_view v(w);
  const std::size_t n = w.size();

  if (ends_with(v, "ss")) return w;
  if (ends_with(v, "ies")) return n > 4 ? w.substr(0, n - 3) + "y" : w.substr(0, n - 1);
  if (ends_with(v, "es")) {
    const auto stem = v.substr(0, n - 2);
    if (ends_with(stem, "sh") || ends_with(stem, "ch") || ends_with(stem, "x") || ends_with(stem, "z") ||
        ends_with(stem, "ss"))
      return std::string(stem);
    if (ends_with(stem, "o") && n > 4) return std::string(stem);
  }
  if (v.back() == 's') {
    const char prev = v[n - 2];
    if (prev != 's' && prev != 'u' && prev != 'i') return w.substr(0, n - 1);
    return w;
  }
  if (ends_with(v, "ied")) return n > 4 ? w.substr(0, n - 3) + "y" : w.substr(0, n - 1);
  if (ends_with(v, "eed")) return w;
  if (ends_with(v, "ed") && n >= 5) {
    const auto stem = w.substr(0, n - 2);
    return has_vowel(stem) ? fix_stem(stem) : w;
  }
  if (ends_with(v, "ing") && n >= 6) {
    const auto stem = w.substr(0, n - 3);
    return has_vowel(stem) ? fix_stem(stem) : w;
  }
  return w;
}

}  // namespace

std::string lemmatize_word(std::string_view word) {
  std::string current(word);
  // Each rule shortens the word (net), so this terminates.
  for (;;) {
    std::string next = apply_rules_once(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

std::vector<std::string> lemmatize(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lemmatize_word(t));
  return out;
}

// ---------------------------------------------------------------------------

TokenList Preprocessor::process(std::string_view text, std::string source_id) const {
  auto tokens = remove_stopwords(tokenize(text), stopwords_);
  tokens = remove_stopwords(lemmatize(tokens), stopwords_);
  return {std::move(source_id), std::move(tokens)};
}

std::vector<TokenList> preprocess_corpus_serial(const Preprocessor& pre, const Corpus& corpus) {
  std::vector<TokenList> out;
  out.reserve(corpus.size());
  for (const auto& d : corpus.documents) out.push_back(pre.process(d.text, d.id));
  return out;
}

std::vector<TokenList> preprocess_corpus(const Preprocessor& pre, const Corpus& corpus) {
  std::vector<TokenList> out(corpus.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& d = corpus.documents[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = pre.process(d.text, d.id);
  }
  return out;
}

// ---------------------------------------------------------------------------

FrequencyTable class_frequencies(const std::vector<TokenList>& docs, const std::function<bool(std::size_t)>& select,
                                 std::size_t top_k) {
  std::map<std::string, std::size_t> counts;
  FrequencyTable table;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!select(i)) continue;
    ++table.n_documents;
    for (const auto& t : docs[i].tokens) ++counts[t];
    table.total_tokens += docs[i].tokens.size();
  }
  if (table.n_documents == 0) fail(ErrorKind::Validation, "no documents match the class filter");

  std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
  // map order is lexicographic, so a stable sort on count keeps ties lexicographic
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (sorted.size() > top_k) sorted.resize(top_k);
  for (auto& [word, count] : sorted) {
    const double pct = table.total_tokens == 0
                           ? 0.0
                           : static_cast<double>(count) / static_cast<double>(table.total_tokens) * 100.0;
    table.entries.push_back({std::move(word), count, pct});
  }
  return table;
}

std::string frequency_csv(const FrequencyTable& table) {
  std::string out = "word,count,percentage\n";
  char buf[64];
  for (const auto& e : table.entries) {
    std::snprintf(buf, sizeof buf, "%.2f", e.percentage);
    out += csv_escape(e.word) + ',' + std::to_string(e.count) + ',' + buf + '\n';
  }
  return out;
}

std::vector<CloudWord> wordcloud_data(const FrequencyTable& table) {
  if (table.entries.empty()) fail(ErrorKind::Validation, "word cloud needs a non-empty frequency table");
  std::size_t max_count = 0;
  for (const auto& e : table.entries) max_count = std::max(max_count, e.count);
  std::vector<CloudWord> out;
  for (const auto& e : table.entries)
    out.push_back({e.word, max_count == 0 ? 0.0 : static_cast<double>(e.count) / static_cast<double>(max_count)});
  return out;
}

}  // namespace attribkit
