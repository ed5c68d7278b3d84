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

#include "attribkit/detector.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "attribkit/svg.hpp"
#include "httplib.h"

namespace attribkit {

std::string_view to_string(Band b) {
  switch (b) {
    case Band::Human: return "Human";
    case Band::AI: return "AI";
    case Band::Mix: return "Mix";
    case Band::DifferentResult: return "Different Result";
    case Band::NotRecognized: return "Not Recognized";
  }
  return "?";
}

std::string_view band_message(Band b) {
  switch (b) {
    case Band::Human: return "This text is most likely to be written by a human";
    case Band::DifferentResult:
      return "Our ensemble of detectors predicts different results for this text. Please enter more text for more "
             "precise predictions.";
    case Band::Mix: return "This text is likely to be a mix of human and AI text";
    case Band::AI: return "This text is likely to be written by AI";
    case Band::NotRecognized:
      return "Try typing in some more text (>250 characters) so we can give you accurate results";
  }
  return "";
}

Band band_for_percentage(int p) {
  if (p < 0 || p > 100) fail(ErrorKind::Validation, "AI percentage " + std::to_string(p) + " is outside 0..100");
  if (p <= 10) return Band::Human;
  if (p <= 39) return Band::DifferentResult;
  if (p <= 88) return Band::Mix;
  return Band::AI;
}

DetectorVerdict verdict_for_percentage(int p) {
  const Band b = band_for_percentage(p);
  return {b, p, std::string(band_message(b))};
}

DetectorVerdict not_recognized_verdict() {
  return {Band::NotRecognized, std::nullopt, std::string(band_message(Band::NotRecognized))};
}

// ---------------------------------------------------------------------------
// Language model

namespace {

constexpr std::uint32_t kBos = 0, kEos = 1, kUnk = 2;

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

}  // namespace

std::uint32_t NgramLM::id_of(std::string_view word) const {
  if (word == "<s>") return kBos;
  if (word == "</s>") return kEos;
  const auto it = vocab_.find(std::string(word));
  return it == vocab_.end() ? kUnk : it->second;
}

double NgramLM::probability_ids(std::uint32_t prev, std::uint32_t next) const {
  const auto it = bigram_.find(pair_key(prev, next));
  const double c = it == bigram_.end() ? 0.0 : it->second;
  const double ctx = prev < context_.size() ? static_cast<double>(context_[prev]) : 0.0;
  return (c + alpha_) / (ctx + alpha_ * static_cast<double>(vocabulary_size()));
}

double NgramLM::probability(std::string_view prev, std::string_view next) const {
  return probability_ids(id_of(prev), id_of(next));
}

std::uint64_t NgramLM::context_count(std::string_view prev) const {
  const auto id = id_of(prev);
  return id < context_.size() ? context_[id] : 0;
}

NgramLM train_lm(const std::vector<TokenList>& docs, double alpha) {
  if (!(alpha > 0.0)) fail(ErrorKind::Validation, "smoothing constant must be positive");
  NgramLM lm;
  lm.alpha_ = alpha;
  std::size_t tokens = 0;
  for (const auto& d : docs)
    for (const auto& t : d.tokens) {
      lm.vocab_.emplace(t, static_cast<std::uint32_t>(lm.vocab_.size() + 3));
      ++tokens;
    }
  if (tokens == 0) fail(ErrorKind::Validation, "language model needs a non-empty training corpus");
  lm.context_.assign(lm.vocab_.size() + 3, 0);
  for (const auto& d : docs) {
    if (d.tokens.empty()) continue;
    std::uint32_t prev = kBos;
    auto step = [&](std::uint32_t next) {
      ++lm.context_[prev];
      ++lm.bigram_[pair_key(prev, next)];
      prev = next;
    };
    for (const auto& t : d.tokens) step(lm.vocab_.at(t));
    step(kEos);
  }
  return lm;
}

double perplexity(const NgramLM& lm, const TokenList& doc) {
  if (doc.tokens.empty()) fail(ErrorKind::Validation, "perplexity of an empty document is undefined");
  double nll = 0.0;
  std::uint32_t prev = kBos;
  for (const auto& t : doc.tokens) {
    const auto next = lm.id_of(t);
    nll -= std::log(lm.probability_ids(prev, next));
    prev = next;
  }
  nll -= std::log(lm.probability_ids(prev, kEos));
  return std::exp(nll / static_cast<double>(doc.tokens.size() + 1));
}

double burstiness(std::string_view text) {
  std::vector<double> lengths;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != '.' && text[i] != '!' && text[i] != '?') continue;
    const auto n = tokenize(text.substr(start, i - start)).size();
    if (n > 0) lengths.push_back(static_cast<double>(n));
    start = i + 1;
  }
  if (lengths.empty()) fail(ErrorKind::Validation, "burstiness needs at least one sentence");
  double mean = 0.0;
  for (double l : lengths) mean += l;
  mean /= static_cast<double>(lengths.size());
  double var = 0.0;
  for (double l : lengths) var += (l - mean) * (l - mean);
  var /= static_cast<double>(lengths.size());
  return std::sqrt(var) / mean;
}

// ---------------------------------------------------------------------------
// Calibration

namespace {

double sigmoid(double m) {
  if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

}  // namespace

double Calibration::p_ai(double ppl, double burst) const {
  const double z0 = (std::log(ppl) - mean[0]) / scale[0];
  const double z1 = (burst - mean[1]) / scale[1];
  return sigmoid(bias + weights[0] * z0 + weights[1] * z1);
}

Calibration fit_calibration(const std::vector<std::pair<double, double>>& features, const std::vector<int>& is_ai) {
  const std::size_t n = features.size();
  if (n == 0 || n != is_ai.size()) fail(ErrorKind::Validation, "calibration needs matching, non-empty inputs");
  Calibration cal;
  std::vector<std::array<double, 2>> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(features[i].first > 0.0)) fail(ErrorKind::Numeric, "calibration perplexity must be positive");
    x[i] = {std::log(features[i].first), features[i].second};
  }
  for (int f = 0; f < 2; ++f) {
    double m = 0.0, v = 0.0;
    for (const auto& r : x) m += r[f];
    m /= static_cast<double>(n);
    for (const auto& r : x) v += (r[f] - m) * (r[f] - m);
    const double sd = std::sqrt(v / static_cast<double>(n));
    cal.mean[f] = m;
    cal.scale[f] = sd > 0.0 ? sd : 1.0;
  }
  for (auto& r : x)
    for (int f = 0; f < 2; ++f) r[f] = (r[f] - cal.mean[f]) / cal.scale[f];

  // Newton iterations on the L2-penalized log-likelihood; the small penalty
  // keeps the optimum finite when the classes separate.
  constexpr double kL2 = 1e-3;
  double beta[3] = {0, 0, 0};  // bias, w0, w1
  for (int iter = 0; iter < 100; ++iter) {
    double g[3] = {0, 0, 0}, h[3][3] = {{0}};
    for (std::size_t i = 0; i < n; ++i) {
      const double z[3] = {1.0, x[i][0], x[i][1]};
      const double p = sigmoid(beta[0] + beta[1] * z[1] + beta[2] * z[2]);
      const double r = p - (is_ai[i] ? 1.0 : 0.0), w = p * (1 - p);
      for (int a = 0; a < 3; ++a) {
        g[a] += r * z[a];
        for (int b = 0; b < 3; ++b) h[a][b] += w * z[a] * z[b];
      }
    }
    for (int a = 1; a < 3; ++a) {
      g[a] += kL2 * static_cast<double>(n) * beta[a];
      h[a][a] += kL2 * static_cast<double>(n);
    }
    h[0][0] += 1e-9;
    // Solve h * d = g by Gaussian elimination (3x3, symmetric positive definite).
    double m[3][4];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] = h[a][b];
      m[a][3] = g[a];
    }
    for (int c = 0; c < 3; ++c)
      for (int r = c + 1; r < 3; ++r) {
        const double f = m[r][c] / m[c][c];
        for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
      }
    double d[3];
    for (int r = 2; r >= 0; --r) {
      double s = m[r][3];
      for (int k = r + 1; k < 3; ++k) s -= m[r][k] * d[k];
      d[r] = s / m[r][r];
    }
    double step = 0.0;
    for (int a = 0; a < 3; ++a) {
      beta[a] -= d[a];
      step = std::max(step, std::abs(d[a]));
    }
    if (!std::isfinite(step)) fail(ErrorKind::Numeric, "calibration diverged");
    if (step < 1e-12) break;
  }
  cal.bias = beta[0];
  cal.weights = {beta[1], beta[2]};
  return cal;
}

TokenList detector_tokens(std::string_view text) { return {{}, tokenize(text)}; }

BaselineDetector::BaselineDetector(NgramLM lm, Calibration calibration)
    : lm_(std::move(lm)), calibration_(calibration) {}

std::pair<double, double> BaselineDetector::features(std::string_view text) const {
  const auto toks = detector_tokens(text);
  if (toks.tokens.empty()) fail(ErrorKind::Validation, "text has no words to score");
  return {perplexity(lm_, toks), burstiness(text)};
}

DetectorVerdict BaselineDetector::verdict(std::string_view text) const {
  if (utf8_length(text) < kMinDetectorChars) return not_recognized_verdict();
  const auto [ppl, burst] = features(text);
  const double p = calibration_.p_ai(ppl, burst);
  return verdict_for_percentage(static_cast<int>(std::lround(100.0 * p)));
}

BaselineDetector fit_baseline(const Corpus& train, double alpha) {
  std::vector<TokenList> lm_docs;
  std::vector<std::pair<double, double>> feats;
  std::vector<int> is_ai;
  std::vector<const Document*> calib;
  std::size_t human_seen = 0;
  for (const auto& d : train.documents) {
    if (d.category == Category::Human && human_seen++ % 2 == 0)
      lm_docs.push_back(detector_tokens(d.text));
    else
      calib.push_back(&d);
  }
  if (lm_docs.empty()) fail(ErrorKind::Validation, "baseline detector needs human training documents");
  auto lm = train_lm(lm_docs, alpha);
  for (const Document* d : calib) {
    const auto toks = detector_tokens(d->text);
    if (toks.tokens.empty()) continue;
    feats.emplace_back(perplexity(lm, toks), burstiness(d->text));
    is_ai.push_back(d->category == Category::Llms);
  }
  const auto ai = std::count(is_ai.begin(), is_ai.end(), 1);
  if (ai == 0 || ai == static_cast<std::ptrdiff_t>(is_ai.size()))
    fail(ErrorKind::Validation, "baseline calibration needs both human and LLM documents");
  return BaselineDetector(std::move(lm), fit_calibration(feats, is_ai));
}

// ---------------------------------------------------------------------------
// External detector

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

ExternalDetectorConfig load_detector_config(const std::optional<std::filesystem::path>& path) {
  ExternalDetectorConfig cfg;
  if (path) {
    const auto content = read_file(*path);
    std::size_t line_no = 0, pos = 0;
    while (pos <= content.size()) {
      const auto end = std::min(content.find('\n', pos), content.size());
      const std::string line = trim(std::string_view(content).substr(pos, end - pos));
      pos = end + 1;
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      const std::string where = path->string() + ":" + std::to_string(line_no);
      if (eq == std::string::npos) fail(ErrorKind::Parse, where + ": expected key=value");
      const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      try {
        if (key == "endpoint") cfg.endpoint = value;
        else if (key == "fixtures_dir") cfg.fixtures_dir = value;
        else if (key == "timeout") cfg.timeout_seconds = std::stod(value);
        else if (key == "retries") cfg.max_retries = std::stoi(value);
        else if (key == "backoff_ms") cfg.backoff_ms = std::stoi(value);
        else if (key == "parallel") cfg.max_parallel = static_cast<std::size_t>(std::stoul(value));
        else if (key == "api_key") fail(ErrorKind::Validation, where + ": API keys belong in ATTRIBKIT_API_KEY, not the config file");
        else fail(ErrorKind::Validation, where + ": unknown key '" + key + "'");
      } catch (const std::logic_error&) {
        fail(ErrorKind::Parse, where + ": bad value for '" + key + "'");
      }
    }
  }
  if (const char* key = std::getenv("ATTRIBKIT_API_KEY")) cfg.api_key = key;
  return cfg;
}

std::string redact(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos + 10))
    text.replace(pos, secret.size(), "[redacted]");
  return text;
}

DetectorVerdict map_detector_response(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::Protocol, "detector response is not JSON");
  }
  if (!j.is_object()) fail(ErrorKind::Protocol, "detector response is not a JSON object");
  if (const auto it = j.find("ai_percentage"); it != j.end()) {
    if (!it->is_number()) fail(ErrorKind::Protocol, "ai_percentage is not a number");
    const double v = it->get<double>();
    if (!(v >= 0.0 && v <= 100.0) || v != std::floor(v))
      fail(ErrorKind::Protocol, "ai_percentage must be an integer in 0..100");
    auto verdict = verdict_for_percentage(static_cast<int>(v));
    if (const auto m = j.find("message"); m != j.end() && m->is_string()) verdict.raw_message = m->get<std::string>();
    return verdict;
  }
  if (const auto it = j.find("message"); it != j.end() && it->is_string()) {
    const auto msg = it->get<std::string>();
    if (msg.find("Try typing in some more text") != std::string::npos) {
      auto v = not_recognized_verdict();
      v.raw_message = msg;
      return v;
    }
    for (Band b : kAllBands)
      if (msg == band_message(b) && b != Band::NotRecognized)
        fail(ErrorKind::Protocol, "detector message names band '" + std::string(to_string(b)) +
                                      "' without an ai_percentage");
    fail(ErrorKind::Protocol, "unrecognized detector message");
  }
  fail(ErrorKind::Protocol, "detector response has neither ai_percentage nor message");
}

namespace {

struct Url {
  std::string scheme_host_port;
  std::string path;
};

Url parse_url(const std::string& endpoint) {
  const auto sep = endpoint.find("://");
  if (sep == std::string::npos) fail(ErrorKind::Validation, "detector endpoint must look like http://host[:port]/path");
  const std::string scheme = endpoint.substr(0, sep);
  if (scheme != "http")
    fail(ErrorKind::Validation, "detector endpoint scheme '" + scheme + "' is not supported (plain http only)");
  const auto slash = endpoint.find('/', sep + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

DetectorVerdict post_once(const ExternalDetectorConfig& cfg, const Url& url, const std::string& text) {
  httplib::Client client(url.scheme_host_port);
  const auto usec = static_cast<time_t>(cfg.timeout_seconds * 1e6);
  client.set_connection_timeout(usec / 1000000, usec % 1000000);
  client.set_read_timeout(usec / 1000000, usec % 1000000);
  client.set_write_timeout(usec / 1000000, usec % 1000000);
  httplib::Headers headers;
  if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
  const std::string body = nlohmann::json{{"text", text}}.dump();
  const auto res = client.Post(url.path, headers, body, "application/json");
  if (!res)
    fail(ErrorKind::Transport, "request to " + url.scheme_host_port + url.path + " failed: " +
                                   httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    fail(ErrorKind::Transport, "detector returned HTTP " + std::to_string(res->status));
  return map_detector_response(res->body);
}

}  // namespace

DetectorVerdict external_verdict(const ExternalDetectorConfig& config, const std::string& id, const std::string& text) {
  if (config.fixtures_dir) return map_detector_response(read_file(*config.fixtures_dir / (id + ".json")));
  if (config.endpoint.empty()) fail(ErrorKind::Validation, "no detector endpoint or fixtures directory configured");
  const Url url = parse_url(config.endpoint);
  for (int attempt = 0;; ++attempt) {
    try {
      return post_once(config, url, text);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Transport || attempt >= config.max_retries)
        fail(e.kind(), redact(std::string(e.what()), config.api_key) + " (document '" + id + "', " +
                           std::to_string(attempt + 1) + " attempt" + (attempt == 0 ? "" : "s") + ")");
      std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(config.backoff_ms) << attempt));
    }
  }
}

std::vector<DetectorVerdict> external_verdicts(const ExternalDetectorConfig& config, const std::vector<std::string>& ids,
                                               const std::vector<std::string>& texts) {
  if (ids.size() != texts.size()) fail(ErrorKind::Validation, "document ids and texts differ in count");
  std::vector<DetectorVerdict> out(ids.size());
  std::vector<std::exception_ptr> errors(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < ids.size();) {
      try {
        out[i] = external_verdict(config, ids[i], texts[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(config.max_parallel, ids.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------------------
// Comparison

namespace {

std::size_t band_column(Band b) { return static_cast<std::size_t>(b); }

}  // namespace

DetectorRow row_from_counts(std::string name, bool internal, const std::array<std::size_t, 5>& human,
                            const std::array<std::size_t, 5>& llms) {
  DetectorRow row;
  row.name = std::move(name);
  row.internal = internal;
  row.human = human;
  row.llms = llms;
  for (std::size_t c = 0; c < 5; ++c) row.total += human[c] + llms[c];
  row.correct = human[band_column(Band::Human)] + llms[band_column(Band::AI)];
  if (internal)
    for (Band b : {Band::Mix, Band::DifferentResult, Band::NotRecognized})
      if (human[band_column(b)] + llms[band_column(b)] != 0)
        fail(ErrorKind::Validation, "internal detector '" + row.name + "' produced a '" + std::string(to_string(b)) +
                                        "' verdict");
  return row;
}

ComparisonReport compare(const std::vector<DetectorVerdicts>& detectors, const std::vector<Category>& truth) {
  ComparisonReport report;
  for (const auto& d : detectors) {
    if (d.verdicts.size() != truth.size())
      fail(ErrorKind::Validation, "detector '" + d.name + "' has " + std::to_string(d.verdicts.size()) +
                                      " verdicts for " + std::to_string(truth.size()) + " documents");
    std::array<std::size_t, 5> human{}, llms{};
    for (std::size_t i = 0; i < truth.size(); ++i)
      ++(truth[i] == Category::Human ? human : llms)[band_column(d.verdicts[i].band)];
    report.rows.push_back(row_from_counts(d.name, d.internal, human, llms));
  }
  return report;
}

DetectorVerdict internal_verdict(std::size_t predicted_class, double p_llm) {
  const Band b = predicted_class == 0 ? Band::Human : Band::AI;
  return {b, static_cast<int>(std::lround(100.0 * std::clamp(p_llm, 0.0, 1.0))), std::string(band_message(b))};
}

namespace {

std::string cell(const DetectorRow& r, const std::array<std::size_t, 5>& counts, std::size_t c) {
  if (r.internal && c >= band_column(Band::Mix)) return "-";
  return std::to_string(counts[c]);
}

}  // namespace

std::string ComparisonReport::to_markdown() const {
  std::string md = "| Detector | Class | Human | AI | Mix | Different Result | Not Recognized | Accuracy |\n";
  md += "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    for (int side = 0; side < 2; ++side) {
      const auto& counts = side == 0 ? r.human : r.llms;
      md += "| " + (side == 0 ? r.name : std::string()) + " | " + (side == 0 ? "Human" : "LLMs") + " |";
      for (std::size_t c = 0; c < 5; ++c) md += " " + cell(r, counts, c) + " |";
      md += " " + (side == 0 ? svg::num(100.0 * r.accuracy(), 1) + "%" : std::string()) + " |\n";
    }
  }
  return md;
}

std::string ComparisonReport::to_csv() const {
  std::string csv = "detector,class,human,ai,mix,different_result,not_recognized,correct,total,accuracy\n";
  for (const auto& r : rows)
    for (int side = 0; side < 2; ++side) {
      const auto& counts = side == 0 ? r.human : r.llms;
      csv += csv_escape(r.name) + "," + (side == 0 ? "Human" : "LLMs");
      for (std::size_t c = 0; c < 5; ++c) csv += "," + cell(r, counts, c);
      csv += "," + std::to_string(r.correct) + "," + std::to_string(r.total) + "," + svg::num(r.accuracy(), 6) + "\n";
    }
  return csv;
}

}  // namespace attribkit
