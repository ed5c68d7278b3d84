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

#include "attribkit/commands.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "attribkit/explain.hpp"
#include "attribkit/model_io.hpp"
#include "attribkit/svg.hpp"

namespace attribkit {

namespace fs = std::filesystem;

namespace {

std::string lowercase_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

StopwordSet stopwords_for(const RunConfig& cfg) {
  return cfg.stopwords ? StopwordSet::load(*cfg.stopwords) : StopwordSet::english_v1();
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// File names derived from user data keep only safe characters.
std::string safe_name(std::string_view s) {
  std::string out;
  for (unsigned char c : s) out += std::isalnum(c) || c == '-' || c == '_' || c == '.' ? static_cast<char>(c) : '_';
  return out.empty() ? "_" : out;
}

struct ModelBundle {
  Classifier model;
  Vocabulary vocab;
  Preprocessor pre;
};

ModelBundle load_bundle(const RunConfig& cfg, const Logger& log) {
  if (cfg.model_dir.empty()) fail(ErrorKind::Validation, "--model-dir is required for this command");
  auto vocab = Vocabulary::load(cfg.model_dir / "vocab.tsv");
  Preprocessor pre(stopwords_for(cfg));
  LoadOptions opts;
  opts.expected_vocabulary_hash = vocab.hash();
  opts.expected_stopword_hash = pre.stopwords().hash();
  opts.allow_mismatch = cfg.allow_mismatch;
  auto loaded = load_model(cfg.model_dir / "model.bin", opts);
  for (const auto& w : loaded.warnings) log("warning: " + w);
  if (loaded.model.blocked())
    fail(ErrorKind::Validation, "refusing to use " + (cfg.model_dir / "model.bin").string() + ": " + loaded.warnings.front() +
                                    " (pass --allow-mismatch to override)");
  return {std::move(loaded.model), std::move(vocab), std::move(pre)};
}

std::vector<std::string> names_of(const Classifier& m) { return m.metadata().class_names; }

/// Labels for `task`, or -1 per document when a label cannot be encoded.
std::vector<int> try_labels(const Corpus& corpus, Task task) {
  std::vector<int> out;
  out.reserve(corpus.size());
  for (const auto& d : corpus.documents) {
    try {
      out.push_back(encode_label(d, task));
    } catch (const Error&) {
      out.push_back(-1);
    }
  }
  return out;
}

std::vector<std::string> read_split_ids(const fs::path& path, const char* side) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
    return j.at(side).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, path.string() + ": malformed split manifest (" + e.what() + ")");
  }
}

std::string format_probs(const std::vector<double>& p) {
  std::string out;
  for (double x : p) out += "," + svg::num(x, 6);
  return out;
}

}  // namespace

Corpus load_inputs(const RunConfig& cfg) {
  if (cfg.inputs.empty()) fail(ErrorKind::Validation, "no --input given");
  std::vector<Corpus> parts;
  for (const auto& path : cfg.inputs) {
    std::string fmt = cfg.format;
    if (fmt.empty()) fmt = lowercase_ext(path) == ".csv" ? "csv" : "jsonl";
    if (fmt == "csv")
      parts.push_back(load_kaggle_csv(path));
    else if (fmt == "jsonl")
      parts.push_back(load_labeled_jsonl(path));
    else
      fail(ErrorKind::Validation, "unknown input format '" + fmt + "' (expected csv or jsonl)");
  }
  return parts.size() == 1 ? std::move(parts.front()) : merge(std::move(parts));
}

// ---------------------------------------------------------------------------

void cmd_stats(const RunConfig& cfg, const Logger& log) {
  const auto corpus = load_inputs(cfg);
  const Preprocessor pre(stopwords_for(cfg));
  const auto docs = preprocess_corpus(pre, corpus);
  const auto names = class_names(cfg.task);
  const auto labels = try_labels(corpus, cfg.task);
  const fs::path dir = cfg.out / "stats";
  for (std::size_t c = 0; c < names.size(); ++c) {
    const auto table = class_frequencies(
        docs, [&](std::size_t i) { return labels[i] == static_cast<int>(c); }, cfg.top_k);
    write_file(dir / ("freq-" + names[c] + ".csv"), frequency_csv(table));
    std::vector<svg::CloudItem> items;
    for (const auto& w : wordcloud_data(table)) items.push_back({w.word, w.weight});
    write_file(dir / ("cloud-" + names[c] + ".svg"), svg::word_cloud("Word cloud: " + names[c], items));
    log("stats: class '" + names[c] + "' has " + std::to_string(table.n_documents) + " documents, " +
        std::to_string(table.total_tokens) + " tokens");
  }
}

Classifier train_classifier(const RunConfig& cfg, const FeatureMatrix& train, const std::vector<std::string>& names,
                            const std::string& stopword_hash) {
  const int k = static_cast<int>(names.size());
  const std::uint64_t stream = derive_seed(cfg.seed, "bootstrap");
  ModelMetadata meta;
  meta.kind = cfg.model;
  meta.task = cfg.task;
  meta.class_names = names;
  meta.vocabulary_hash = train.vocabulary_hash;
  meta.stopword_hash = stopword_hash;
  meta.preprocess_version = std::string(kPreprocessVersion);
  meta.feature_version = std::string(kTfidfVersion);
  meta.dimension = train.dimension;
  switch (cfg.model) {
    case ModelKind::Forest: {
      ForestParams p;
      if (cfg.n_trees) p.n_trees = *cfg.n_trees;
      if (cfg.max_depth) p.max_depth = *cfg.max_depth;
      p.seed = stream;
      meta.hyperparameters = p.to_json();
      return Classifier(std::move(meta), train_forest(train, k, p));
    }
    case ModelKind::Boosted: {
      BoostedParams p;
      if (cfg.n_rounds) p.n_rounds = *cfg.n_rounds;
      if (cfg.max_depth) p.max_depth = *cfg.max_depth;
      if (cfg.eta) p.learning_rate = *cfg.eta;
      if (cfg.lambda) p.lambda = *cfg.lambda;
      if (cfg.gamma) p.gamma = *cfg.gamma;
      p.seed = stream;
      meta.hyperparameters = p.to_json();
      return Classifier(std::move(meta), train_boosted(train, k, p));
    }
    case ModelKind::Linear: {
      LinearParams p;
      if (cfg.epochs) p.epochs = *cfg.epochs;
      if (cfg.eta) p.learning_rate = *cfg.eta;
      p.seed = stream;
      meta.hyperparameters = p.to_json();
      return Classifier(std::move(meta), train_linear(train, k, p));
    }
  }
  fail(ErrorKind::Validation, "unknown model kind");
}

TrainResult cmd_train(const RunConfig& cfg, const Logger& log) {
  const auto corpus = load_inputs(cfg);
  encode_labels(corpus, cfg.task);  // rejects e.g. unlabeled tools under --task multi
  const auto parts = split(corpus, {cfg.test_fraction, derive_seed(cfg.seed, "split"), cfg.stratified});
  log("train: " + std::to_string(parts.train.size()) + " training and " + std::to_string(parts.test.size()) +
      " test documents");

  const Preprocessor pre(stopwords_for(cfg));
  const auto train_docs = preprocess_corpus(pre, parts.train);
  const auto test_docs = preprocess_corpus(pre, parts.test);
  const auto vocab = fit_vocabulary(train_docs, cfg.min_df, cfg.max_features);
  TransformStats train_stats, test_stats;
  const auto train_m = transform_batch(train_docs, vocab, encode_labels(parts.train, cfg.task), &train_stats);
  const auto test_m = transform_batch(test_docs, vocab, encode_labels(parts.test, cfg.task), &test_stats);
  log("train: vocabulary of " + std::to_string(vocab.size()) + " terms; " + std::to_string(test_stats.ignored_tokens) +
      " out-of-vocabulary test tokens ignored");

  const auto names = class_names(cfg.task);
  const auto model = train_classifier(cfg, train_m, names, pre.stopwords().hash());
  auto report = evaluate(model, test_m, names, cfg.average);
  report.model_name = std::string(to_string(cfg.model));

  const fs::path& dir = cfg.out;
  save_model(model, dir / "model.bin");
  vocab.save(dir / "vocab.tsv");
  nlohmann::ordered_json manifest;
  manifest["seed"] = cfg.seed;
  manifest["test_fraction"] = cfg.test_fraction;
  manifest["stratified"] = cfg.stratified;
  std::vector<std::string> train_ids, test_ids;
  for (const auto& d : parts.train.documents) train_ids.push_back(d.id);
  for (const auto& d : parts.test.documents) test_ids.push_back(d.id);
  manifest["train"] = train_ids;
  manifest["test"] = test_ids;
  write_file(dir / "split.json", dump(manifest));
  write_file(dir / "report.md", report.to_markdown());
  write_file(dir / "report.json", dump(report.to_json()));
  write_file(dir / "metrics.csv", report.metrics_csv());
  write_file(dir / "confusion.csv", report.confusion_csv());
  write_file(dir / "confusion.svg", report.confusion_svg());

  std::string train_log;
  train_log += "task=" + std::string(to_string(cfg.task)) + "\n";
  train_log += "model=" + std::string(to_string(cfg.model)) + "\n";
  train_log += "seed=" + std::to_string(cfg.seed) + "\n";
  train_log += "documents=" + std::to_string(corpus.size()) + " train=" + std::to_string(parts.train.size()) +
               " test=" + std::to_string(parts.test.size()) + "\n";
  train_log += "vocabulary=" + std::to_string(vocab.size()) + " hash=" + vocab.hash() + "\n";
  train_log += "stopwords=" + pre.stopwords().hash() + "\n";
  train_log += "hyperparameters=" + model.metadata().hyperparameters.dump() + "\n";
  if (const auto* b = std::get_if<BoostedModel>(&model.model()); b && !b->train_loss.empty())
    train_log += "train_loss_first=" + svg::num(b->train_loss.front(), 6) +
                 " train_loss_last=" + svg::num(b->train_loss.back(), 6) + "\n";
  train_log += "test_accuracy=" + svg::num(report.accuracy, 6) + "\n";
  write_file(dir / "train.log", train_log);
  log("train: held-out accuracy " + svg::num(100.0 * report.accuracy, 2) + "%; artifacts in " + dir.string());
  return {std::move(report), dir / "model.bin"};
}

void cmd_predict(const RunConfig& cfg, const Logger& log) {
  const auto bundle = load_bundle(cfg, log);
  const auto corpus = load_inputs(cfg);
  const auto docs = preprocess_corpus(bundle.pre, corpus);
  const auto matrix = transform_batch(docs, bundle.vocab, {});
  const auto probs = bundle.model.predict_proba_batch(matrix.rows);
  const auto names = names_of(bundle.model);
  std::string csv = "id,predicted";
  for (const auto& n : names) csv += ",p_" + n;
  csv += "\n";
  for (std::size_t i = 0; i < docs.size(); ++i)
    csv += csv_escape(corpus.documents[i].id) + "," + names[argmax(probs[i])] + format_probs(probs[i]) + "\n";
  write_file(cfg.out / "predictions.csv", csv);
  log("predict: wrote " + std::to_string(docs.size()) + " predictions");
}

EvalReport cmd_evaluate(const RunConfig& cfg, const Logger& log) {
  const auto bundle = load_bundle(cfg, log);
  auto corpus = load_inputs(cfg);
  if (cfg.split == "test")
    corpus = split_by_ids(corpus, read_split_ids(cfg.model_dir / "split.json", "test")).test;
  else if (cfg.split != "all")
    fail(ErrorKind::Validation, "--split must be 'all' or 'test'");
  const auto& meta = bundle.model.metadata();
  const auto docs = preprocess_corpus(bundle.pre, corpus);
  const auto matrix = transform_batch(docs, bundle.vocab, encode_labels(corpus, meta.task));
  auto report = evaluate(bundle.model, matrix, meta.class_names, cfg.average);
  report.model_name = std::string(to_string(meta.kind));
  write_file(cfg.out / "report.md", report.to_markdown());
  write_file(cfg.out / "report.json", dump(report.to_json()));
  write_file(cfg.out / "metrics.csv", report.metrics_csv());
  write_file(cfg.out / "confusion.csv", report.confusion_csv());
  write_file(cfg.out / "confusion.svg", report.confusion_svg());
  log("evaluate: accuracy " + svg::num(100.0 * report.accuracy, 2) + "% on " + std::to_string(report.n_rows) +
      " documents");
  return report;
}

void cmd_explain(const RunConfig& cfg, const Logger& log) {
  const auto bundle = load_bundle(cfg, log);
  const auto corpus = load_inputs(cfg);
  const auto names = names_of(bundle.model);
  const auto labels = try_labels(corpus, bundle.model.metadata().task);
  const std::unordered_set<std::string> wanted(cfg.ids.begin(), cfg.ids.end());
  ExplainParams params;
  params.top_k = cfg.top_k;
  params.n_samples = cfg.lime_samples;
  params.kernel_width = cfg.kernel_width;

  const fs::path dir = cfg.out / "explain";
  auto summary = nlohmann::ordered_json::array();
  std::size_t done = 0, failed = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus.documents[i];
    if (!wanted.empty() && !wanted.count(d.id)) continue;
    if (cfg.max_docs && done + failed >= cfg.max_docs) break;
    nlohmann::ordered_json entry;
    entry["id"] = d.id;
    try {
      const auto tokens = bundle.pre.process(d.text, d.id);
      const auto inst = make_instance(tokens, bundle.vocab);
      const auto probs = bundle.model.predict_proba(inst.original_row);
      const int target = static_cast<int>(argmax(probs));
      Rng rng(derive_seed(cfg.seed, "lime", i));
      auto e = explain_instance(bundle.model, inst, bundle.vocab, target, params, rng);
      e.target_name = names[static_cast<std::size_t>(target)];
      nlohmann::ordered_json out;
      out["id"] = d.id;
      out["text"] = d.text;
      out["true_label"] = labels[i] >= 0 ? nlohmann::ordered_json(names[static_cast<std::size_t>(labels[i])])
                                         : nlohmann::ordered_json(nullptr);
      out["predicted_label"] = e.target_name;
      out["probabilities"] = probs;
      out["explanation"] = e.to_json();
      const std::string stem = safe_name(d.id);
      write_file(dir / (stem + ".json"), dump(out));
      write_file(dir / (stem + ".svg"), e.to_svg());
      entry["status"] = "ok";
      entry["predicted_label"] = e.target_name;
      entry["local_fit_quality"] = e.local_fit_quality;
      ++done;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Validation) throw;
      entry["status"] = "error";
      entry["error"] = e.what();
      log("explain: " + d.id + ": " + e.what());
      ++failed;
    }
    summary.push_back(std::move(entry));
  }
  if (!wanted.empty() && done + failed == 0) fail(ErrorKind::Validation, "none of the requested ids is in the input");
  write_file(dir / "summary.json", dump(summary));
  log("explain: " + std::to_string(done) + " explained, " + std::to_string(failed) + " failed");
}

void cmd_profile(const RunConfig& cfg, const Logger& log) {
  const auto bundle = load_bundle(cfg, log);
  const auto corpus = load_inputs(cfg);
  const auto& meta = bundle.model.metadata();
  const auto labels = try_labels(corpus, meta.task);
  const auto docs = preprocess_corpus(bundle.pre, corpus);
  const std::size_t per_class = cfg.max_docs ? cfg.max_docs : 25;
  ExplainParams params;
  params.top_k = cfg.top_k;
  params.n_samples = cfg.lime_samples;
  params.kernel_width = cfg.kernel_width;
  const fs::path dir = cfg.out / "profile";
  for (std::size_t c = 0; c < meta.class_names.size(); ++c) {
    std::vector<TokenList> sample;
    for (std::size_t i = 0; i < docs.size() && sample.size() < per_class; ++i)
      if (labels[i] == static_cast<int>(c)) sample.push_back(docs[i]);
    if (sample.empty()) {
      log("profile: no documents of class '" + meta.class_names[c] + "' in the input; skipped");
      continue;
    }
    auto prof = class_profile(bundle.model, sample, bundle.vocab, static_cast<int>(c), params,
                              derive_seed(cfg.seed, "lime", c));
    prof.class_name = meta.class_names[c];
    write_file(dir / (safe_name(prof.class_name) + ".json"), dump(prof.to_json()));
    write_file(dir / (safe_name(prof.class_name) + ".svg"), prof.to_svg());
    log("profile: class '" + prof.class_name + "' from " + std::to_string(prof.n_instances_aggregated) + " documents");
  }
}

ComparisonReport cmd_compare(const RunConfig& cfg, const Logger& log) {
  const auto bundle = load_bundle(cfg, log);
  const auto corpus = load_inputs(cfg);
  const auto split_path = cfg.model_dir / "split.json";
  const auto parts = fs::exists(split_path)
                         ? split_by_ids(corpus, read_split_ids(split_path, "test"))
                         : split(corpus, {cfg.test_fraction, derive_seed(cfg.seed, "split"), cfg.stratified});
  const auto& test = parts.test;
  std::vector<Category> truth;
  std::vector<std::string> ids, texts;
  for (const auto& d : test.documents) {
    truth.push_back(d.category);
    ids.push_back(d.id);
    texts.push_back(d.text);
  }

  std::vector<DetectorVerdicts> detectors;
  auto ext = load_detector_config(cfg.detector_config);
  if (!cfg.detector_endpoint.empty()) ext.endpoint = cfg.detector_endpoint;
  if (cfg.fixtures_dir) ext.fixtures_dir = cfg.fixtures_dir;
  if (ext.fixtures_dir || !ext.endpoint.empty()) {
    log("compare: querying external detector (" +
        (ext.fixtures_dir ? "fixtures " + ext.fixtures_dir->string() : redact(ext.endpoint, ext.api_key)) + ")");
    detectors.push_back({"External", false, external_verdicts(ext, ids, texts)});
  }

  const auto baseline = fit_baseline(parts.train);
  DetectorVerdicts base{"Baseline (perplexity+burstiness)", false, {}};
  for (const auto& t : texts) base.verdicts.push_back(baseline.verdict(t));
  detectors.push_back(std::move(base));

  const auto docs = preprocess_corpus(bundle.pre, test);
  const auto matrix = transform_batch(docs, bundle.vocab, {});
  const auto probs = bundle.model.predict_proba_batch(matrix.rows);
  DetectorVerdicts ours{"Our model (" + std::string(to_string(bundle.model.metadata().kind)) + ")", true, {}};
  for (const auto& p : probs) ours.verdicts.push_back(internal_verdict(argmax(p), 1.0 - p[0]));
  detectors.push_back(std::move(ours));

  const auto report = compare(detectors, truth);
  write_file(cfg.out / "comparison.md", report.to_markdown());
  write_file(cfg.out / "comparison.csv", report.to_csv());
  std::string verdicts = "id,true";
  for (const auto& d : detectors) verdicts += "," + csv_escape(d.name);
  verdicts += "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    verdicts += csv_escape(ids[i]) + "," + std::string(to_string(truth[i]));
    for (const auto& d : detectors) verdicts += "," + std::string(to_string(d.verdicts[i].band));
    verdicts += "\n";
  }
  write_file(cfg.out / "verdicts.csv", verdicts);
  for (const auto& r : report.rows)
    log("compare: " + r.name + " accuracy " + svg::num(100.0 * r.accuracy(), 1) + "% (" + std::to_string(r.correct) +
        "/" + std::to_string(r.total) + ")");
  return report;
}

void cmd_synth(const RunConfig& cfg, const Logger& log) {
  const auto spec = cfg.task == Task::Binary ? binary_preset(cfg.seed, cfg.marker_weight)
                                             : multi_preset(cfg.seed, cfg.marker_weight, cfg.human_marker_weight);
  const auto corpus = generate_synthetic(spec);
  const std::string stem = "synthetic-" + std::string(to_string(cfg.task));
  if (cfg.format == "csv")
    write_file(cfg.out / (stem + ".csv"), to_kaggle_csv(corpus));
  else
    save_labeled_jsonl(corpus, cfg.out / (stem + ".jsonl"));
  log("synth: wrote " + std::to_string(corpus.size()) + " documents");
}

}  // namespace attribkit
