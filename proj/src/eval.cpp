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

#include "attribkit/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <numeric>
#include <unordered_set>

#include "attribkit/parallel.hpp"
#include "attribkit/preprocess.hpp"
#include "attribkit/svg.hpp"

namespace attribkit {

std::string_view to_string(Averaging a) { return a == Averaging::Macro ? "macro" : "weighted"; }

std::optional<Averaging> parse_averaging(std::string_view s) {
  if (s == "macro") return Averaging::Macro;
  if (s == "weighted") return Averaging::Weighted;
  return std::nullopt;
}

std::vector<std::vector<double>> confusion_pct(const std::vector<std::vector<std::size_t>>& confusion) {
  std::vector<std::vector<double>> out(confusion.size());
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    const auto& row = confusion[i];
    const std::size_t total = std::accumulate(row.begin(), row.end(), std::size_t{0});
    out[i].assign(row.size(), 0.0);
    if (total == 0) continue;
    for (std::size_t j = 0; j < row.size(); ++j)
      out[i][j] = 100.0 * static_cast<double>(row[j]) / static_cast<double>(total);
  }
  return out;
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<std::uint8_t>& positive) {
  if (scores.size() != positive.size()) fail(ErrorKind::Validation, "ROC scores and labels differ in count");
  const std::size_t n_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), 1));
  const std::size_t n_neg = positive.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) fail(ErrorKind::Validation, "ROC needs both positive and negative examples");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) (positive[order[i]] ? tp : fp) += 1;
    const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
    const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
    const auto [px, py] = roc.points.back();
    roc.auc += (fpr - px) * (tpr + py) / 2.0;
    roc.points.emplace_back(fpr, tpr);
  }
  return roc;
}

EvalReport evaluate_predictions(const std::vector<int>& labels, const std::vector<std::vector<double>>& probabilities,
                                const std::vector<std::string>& class_names, Averaging averaging) {
  const std::size_t k = class_names.size();
  if (labels.empty()) fail(ErrorKind::Validation, "cannot evaluate an empty test set");
  if (labels.size() != probabilities.size())
    fail(ErrorKind::Validation, "label and prediction counts differ");
  if (k < 2) fail(ErrorKind::Validation, "evaluation needs at least two classes");

  EvalReport r;
  r.averaging = averaging;
  r.task = k == 2 ? Task::Binary : Task::Multi;
  r.n_rows = labels.size();
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k)
      fail(ErrorKind::Validation, "label " + std::to_string(labels[i]) + " is outside the class list");
    if (probabilities[i].size() != k) fail(ErrorKind::Validation, "prediction width differs from the class count");
    const std::size_t pred = argmax(probabilities[i]);
    ++r.confusion[static_cast<std::size_t>(labels[i])][pred];
    correct += pred == static_cast<std::size_t>(labels[i]);
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  r.confusion_pct = confusion_pct(r.confusion);

  r.per_class.resize(k);
  std::size_t present = 0;
  for (std::size_t c = 0; c < k; ++c) {
    auto& m = r.per_class[c];
    m.label = class_names[c];
    std::size_t predicted = 0;
    for (std::size_t t = 0; t < k; ++t) predicted += r.confusion[t][c];
    m.support = std::accumulate(r.confusion[c].begin(), r.confusion[c].end(), std::size_t{0});
    const double tp = static_cast<double>(r.confusion[c][c]);
    m.precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    m.recall = m.support == 0 ? 0.0 : tp / static_cast<double>(m.support);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    if (m.support == 0) continue;
    ++present;
    const double w = averaging == Averaging::Macro ? 1.0 : static_cast<double>(m.support);
    r.precision += w * m.precision;
    r.recall += w * m.recall;
    r.f1 += w * m.f1;
  }
  const double denom = averaging == Averaging::Macro ? static_cast<double>(present) : static_cast<double>(r.n_rows);
  r.precision /= denom;
  r.recall /= denom;
  r.f1 /= denom;

  r.roc.resize(k);
  for_each_index(k, true, [&](std::size_t c) {
    const auto& m = r.per_class[c];
    if (m.support == 0 || m.support == r.n_rows) return;
    std::vector<double> scores(labels.size());
    std::vector<std::uint8_t> pos(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      scores[i] = probabilities[i][c];
      pos[i] = static_cast<std::size_t>(labels[i]) == c;
    }
    r.roc[c] = roc_curve(scores, pos);
  });
  for (std::size_t c = 0; c < k; ++c)
    if (r.roc[c]) r.per_class[c].auc = r.roc[c]->auc;
  return r;
}

EvalReport evaluate(const ProbabilityModel& model, const FeatureMatrix& test,
                    const std::vector<std::string>& class_names, Averaging averaging) {
  if (test.dimension != model.dimension())
    fail(ErrorKind::Validation, "test matrix has " + std::to_string(test.dimension) + " columns but the model expects " +
                                    std::to_string(model.dimension()));
  if (model.n_classes() != class_names.size())
    fail(ErrorKind::Validation, "class list does not match the model");
  std::vector<std::vector<double>> probs;
  if (const auto* clf = dynamic_cast<const Classifier*>(&model)) {
    if (!test.vocabulary_hash.empty() && clf->metadata().vocabulary_hash != test.vocabulary_hash)
      fail(ErrorKind::Validation, "test matrix vocabulary " + test.vocabulary_hash +
                                      " differs from the model's vocabulary " + clf->metadata().vocabulary_hash);
    probs = clf->predict_proba_batch(test.rows);
  } else {
    probs.resize(test.rows.size());
    for_each_index(test.rows.size(), true, [&](std::size_t i) { probs[i] = model.predict_proba(test.rows[i]); });
  }
  return evaluate_predictions(test.labels, probs, class_names, averaging);
}

namespace {

std::string pct(double fraction) { return svg::num(100.0 * fraction, 2) + "%"; }

}  // namespace

std::string EvalReport::to_markdown() const {
  std::string md = "# Evaluation: " + (model_name.empty() ? std::string("model") : model_name) + " (" +
                   std::string(to_string(task)) + ")\n\n";
  md += "| Algorithm | Accuracy | Precision | Recall | F1-Score |\n|---|---|---|---|---|\n";
  md += "| " + (model_name.empty() ? std::string("model") : model_name) + " | " + pct(accuracy) + " | " +
        pct(precision) + " | " + pct(recall) + " | " + pct(f1) + " |\n\n";
  md += "Test rows: " + std::to_string(n_rows) + ". Precision, recall and F1 use " +
        std::string(to_string(averaging)) + " averaging.\n\n";

  md += "## Per-class metrics\n\n| Class | Precision | Recall | F1-Score | Support | AUC |\n|---|---|---|---|---|---|\n";
  for (const auto& m : per_class)
    md += "| " + m.label + " | " + pct(m.precision) + " | " + pct(m.recall) + " | " + pct(m.f1) + " | " +
          std::to_string(m.support) + " | " + (m.auc ? svg::num(*m.auc, 4) : std::string("-")) + " |\n";

  auto matrix = [&](const std::string& title, auto cell) {
    std::string out = "\n## " + title + "\n\n| true \\ predicted |";
    for (const auto& m : per_class) out += " " + m.label + " |";
    out += "\n|---|";
    for (std::size_t j = 0; j < per_class.size(); ++j) out += "---|";
    out += "\n";
    for (std::size_t i = 0; i < per_class.size(); ++i) {
      out += "| " + per_class[i].label + " |";
      for (std::size_t j = 0; j < per_class.size(); ++j) out += " " + cell(i, j) + " |";
      out += "\n";
    }
    return out;
  };
  md += matrix("Confusion matrix (counts)", [&](std::size_t i, std::size_t j) { return std::to_string(confusion[i][j]); });
  md += matrix("Confusion matrix (percent of true class)",
               [&](std::size_t i, std::size_t j) { return svg::num(confusion_pct[i][j], 2); });
  return md;
}

std::string EvalReport::metrics_csv() const {
  std::string csv = "row,accuracy,precision,recall,f1,support,auc\n";
  csv += std::string(to_string(averaging)) + "," + svg::num(accuracy, 6) + "," + svg::num(precision, 6) + "," +
         svg::num(recall, 6) + "," + svg::num(f1, 6) + "," + std::to_string(n_rows) + ",\n";
  for (const auto& m : per_class)
    csv += csv_escape(m.label) + ",," + svg::num(m.precision, 6) + "," + svg::num(m.recall, 6) + "," +
           svg::num(m.f1, 6) + "," + std::to_string(m.support) + "," + (m.auc ? svg::num(*m.auc, 6) : "") + "\n";
  return csv;
}

std::string EvalReport::confusion_csv() const {
  std::string csv = "true\\predicted";
  for (const auto& m : per_class) csv += "," + csv_escape(m.label);
  csv += "\n";
  for (std::size_t i = 0; i < per_class.size(); ++i) {
    csv += csv_escape(per_class[i].label);
    for (std::size_t j = 0; j < per_class.size(); ++j) csv += "," + std::to_string(confusion[i][j]);
    csv += "\n";
  }
  return csv;
}

std::string EvalReport::confusion_svg() const {
  std::vector<std::string> labels;
  for (const auto& m : per_class) labels.push_back(m.label);
  return svg::heatmap("Confusion matrix (%)" + (model_name.empty() ? std::string() : ": " + model_name), labels,
                      confusion_pct, 100.0, 1);
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["task"] = std::string(to_string(task));
  j["averaging"] = std::string(to_string(averaging));
  j["n_rows"] = n_rows;
  j["accuracy"] = accuracy;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  auto classes = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const auto& m = per_class[c];
    nlohmann::ordered_json e;
    e["label"] = m.label;
    e["precision"] = m.precision;
    e["recall"] = m.recall;
    e["f1"] = m.f1;
    e["support"] = m.support;
    e["auc"] = m.auc ? nlohmann::ordered_json(*m.auc) : nlohmann::ordered_json(nullptr);
    if (roc[c]) {
      auto pts = nlohmann::ordered_json::array();
      for (const auto& [x, y] : roc[c]->points) pts.push_back({x, y});
      e["roc"] = std::move(pts);
    }
    classes.push_back(std::move(e));
  }
  j["per_class"] = std::move(classes);
  j["confusion"] = confusion;
  j["confusion_pct"] = confusion_pct;
  return j;
}

// ---------------------------------------------------------------------------
// Synthetic corpora

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
// Function words sprinkled between content tokens; all are in the default stoplist.
constexpr std::string_view kFillers[] = {"the", "of", "and", "to", "a", "in", "is", "that",
                                         "it", "for", "this", "with", "as", "on", "be"};

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) cdf_[r] = acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
    for (auto& c : cdf_) c /= acc;
  }
  std::size_t operator()(Rng& rng) const {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

void check_spec(const SyntheticSpec& spec) {
  if (spec.classes.size() < 2) fail(ErrorKind::Validation, "synthetic spec needs at least two classes");
  if (spec.background.empty()) fail(ErrorKind::Validation, "synthetic spec has an empty background vocabulary");
  if (!(spec.zipf_exponent >= 0.0)) fail(ErrorKind::Validation, "Zipf exponent must be non-negative");
  if (!(spec.filler_rate >= 0.0 && spec.filler_rate < 1.0))
    fail(ErrorKind::Validation, "filler rate must lie in [0, 1)");
  if (spec.min_sentences == 0 || spec.min_sentences > spec.max_sentences)
    fail(ErrorKind::Validation, "invalid sentence count range");
  for (const auto& c : spec.classes) {
    const std::string name(to_string(c.subcategory));
    if (c.n_docs == 0) fail(ErrorKind::Validation, "synthetic class '" + name + "' has no documents");
    if (!(c.marker_weight >= 0.0 && c.marker_weight <= 1.0))
      fail(ErrorKind::Validation, "marker weight of '" + name + "' must lie in [0, 1]");
    if (c.marker_weight > 0.0 && c.markers.empty())
      fail(ErrorKind::Validation, "class '" + name + "' has a marker weight but no marker words");
    if (c.min_sentence == 0 || c.min_sentence > c.max_sentence)
      fail(ErrorKind::Validation, "invalid sentence length range for '" + name + "'");
    if (c.subcategory == Subcategory::Unknown)
      fail(ErrorKind::Validation, "synthetic classes need a concrete subcategory");
  }
}

}  // namespace

std::vector<std::string> pseudo_words(std::size_t count, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "lexicon"));
  const auto& stop = StopwordSet::english_v1();
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  while (out.size() < count) {
    const std::size_t syllables = 2 + uniform_index(rng, 2);
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kConsonants[uniform_index(rng, kConsonants.size())];
      w += kVowels[uniform_index(rng, kVowels.size())];
    }
    if (stop.contains(w) || lemmatize_word(w) != w || !seen.insert(w).second) continue;
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

// Lexicon slices shared by the presets: [0, 600) background, then marker pools.
constexpr std::size_t kBackground = 600, kPool = 30;

std::vector<std::string> slice(const std::vector<std::string>& words, std::size_t pool) {
  const auto begin = words.begin() + static_cast<std::ptrdiff_t>(kBackground + pool * kPool);
  return {begin, begin + static_cast<std::ptrdiff_t>(kPool)};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

constexpr Subcategory kTools[] = {Subcategory::ChatGPT, Subcategory::Llama, Subcategory::Bard, Subcategory::Claude,
                                  Subcategory::Perplexity};

}  // namespace

SyntheticSpec binary_preset(std::uint64_t seed, double marker_weight) {
  const auto words = pseudo_words(kBackground + 7 * kPool, seed);
  SyntheticSpec spec;
  spec.seed = seed;
  spec.background.assign(words.begin(), words.begin() + kBackground);
  // Human text: its own markers and widely varying sentence lengths.
  spec.classes.push_back({Subcategory::Human, 300, marker_weight, slice(words, 0), 3, 30});
  // Every tool shares a common pool and adds a small style pool of its own.
  const auto shared = slice(words, 1);
  for (std::size_t t = 0; t < 5; ++t)
    spec.classes.push_back({kTools[t], 60, marker_weight, concat(shared, slice(words, 2 + t)), 12, 18});
  return spec;
}

SyntheticSpec multi_preset(std::uint64_t seed, double marker_weight, std::optional<double> human_marker_weight) {
  auto spec = binary_preset(seed, marker_weight);
  for (auto& c : spec.classes) c.n_docs = 100;
  if (human_marker_weight) spec.classes[0].marker_weight = *human_marker_weight;
  return spec;
}

Corpus generate_synthetic(const SyntheticSpec& spec) {
  check_spec(spec);
  const ZipfSampler background(spec.background.size(), spec.zipf_exponent);
  Corpus corpus;
  std::size_t global = 0;
  for (const auto& cls : spec.classes) {
    const std::string name(to_string(cls.subcategory));
    for (std::size_t i = 0; i < cls.n_docs; ++i, ++global) {
      Rng rng(derive_seed(spec.seed, "synthetic", global));
      std::string text;
      const std::size_t n_sent =
          spec.min_sentences + uniform_index(rng, spec.max_sentences - spec.min_sentences + 1);
      for (std::size_t s = 0; s < n_sent; ++s) {
        const std::size_t len = cls.min_sentence + uniform_index(rng, cls.max_sentence - cls.min_sentence + 1);
        std::string sentence;
        for (std::size_t t = 0; t < len; ++t) {
          if (bernoulli(rng, spec.filler_rate)) {
            sentence += kFillers[uniform_index(rng, std::size(kFillers))];
            sentence += ' ';
          }
          if (bernoulli(rng, cls.marker_weight))
            sentence += cls.markers[uniform_index(rng, cls.markers.size())];
          else
            sentence += spec.background[background(rng)];
          sentence += t + 1 == len ? "." : " ";
        }
        sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
        if (!text.empty()) text += ' ';
        text += sentence;
      }
      Document d;
      char id[64];
      std::snprintf(id, sizeof id, "syn-%s-%04zu", name.c_str(), i);
      d.id = id;
      d.prompt_id = static_cast<int>(i % 2);
      d.text = std::move(text);
      d.subcategory = cls.subcategory;
      d.category = cls.subcategory == Subcategory::Human ? Category::Human : Category::Llms;
      corpus.documents.push_back(std::move(d));
    }
  }
  corpus.source_manifest.push_back({"<synthetic seed=" + std::to_string(spec.seed) + ">", corpus.documents.size(), {}});
  return corpus;
}

}  // namespace attribkit
