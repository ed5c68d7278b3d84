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

// attribkit: text attribution toolkit command line.
//
//   attribkit synth   --task binary --out data/
//   attribkit train   --input data/synthetic-binary.jsonl --model forest --out run/
//   attribkit explain --model-dir run/ --input data/synthetic-binary.jsonl --id syn-human-0001 --out run/
//
// Exit codes: 0 success, 2 invalid input or usage, 3 I/O or network, 4 numeric failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "attribkit/commands.hpp"
#include "attribkit/parallel.hpp"

namespace {

using attribkit::RunConfig;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attribkit: attribute essays to humans or specific LLM tools"};
  app.set_config("--config", "", "key=value file of option defaults; command-line flags win");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string out = cfg.out.string();
  std::vector<std::string> inputs;
  std::string model_dir, fixtures_dir, detector_config, stopwords;
  std::string task = "binary", model = "forest", average = "macro";
  int jobs = 0;

  app.add_option("--input", inputs, "Input corpus files (Kaggle CSV or labeled JSONL)");
  app.add_option("--format", cfg.format, "Input/output format")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--task", task, "binary (human/llms) or multi (six sources)")
      ->check(CLI::IsMember({"binary", "multi"}))
      ->capture_default_str();
  app.add_option("--model", model, "Model kind to train")
      ->check(CLI::IsMember({"forest", "boosted", "linear"}))
      ->capture_default_str();
  app.add_option("--model-dir", model_dir, "Directory written by `train`");
  app.add_option("--seed", cfg.seed, "Root seed for every random stream")->capture_default_str();
  app.add_option("--test-fraction", cfg.test_fraction, "Held-out fraction")->capture_default_str();
  app.add_flag("--stratified", cfg.stratified, "Stratify the split by source");
  app.add_option("--n-trees", cfg.n_trees, "Forest size");
  app.add_option("--n-rounds", cfg.n_rounds, "Boosting rounds");
  app.add_option("--max-depth", cfg.max_depth, "Maximum tree depth");
  app.add_option("--eta", cfg.eta, "Learning rate (boosting, linear)");
  app.add_option("--lambda", cfg.lambda, "Boosting L2 leaf penalty");
  app.add_option("--gamma", cfg.gamma, "Boosting minimum split gain");
  app.add_option("--epochs", cfg.epochs, "Linear model epochs");
  app.add_option("--min-df", cfg.min_df, "Minimum document frequency")->capture_default_str();
  app.add_option("--max-features", cfg.max_features, "Vocabulary cap");
  app.add_option("--lime-samples", cfg.lime_samples, "Perturbations per explanation")->capture_default_str();
  app.add_option("--kernel-width", cfg.kernel_width, "Explanation kernel width")->capture_default_str();
  app.add_option("--top-k", cfg.top_k, "Words per table, explanation or profile")->capture_default_str();
  app.add_option("--id", cfg.ids, "explain: document ids to explain");
  app.add_option("--max-docs", cfg.max_docs, "explain: document cap; profile: documents per class (default 25)");
  app.add_option("--detector-endpoint", cfg.detector_endpoint, "External detector URL (http)");
  app.add_option("--fixtures-dir", fixtures_dir, "Canned external detector responses, <id>.json");
  app.add_option("--detector-config", detector_config, "External detector key=value config");
  app.add_option("--stopwords", stopwords, "Stopword list file (default: built-in english-v1)");
  app.add_flag("--allow-mismatch", cfg.allow_mismatch, "Use a model despite preprocessing hash mismatches");
  app.add_option("--average", average, "Precision/recall averaging")
      ->check(CLI::IsMember({"macro", "weighted"}))
      ->capture_default_str();
  app.add_option("--split", cfg.split, "evaluate: all documents or the recorded test split")
      ->check(CLI::IsMember({"all", "test"}));
  app.add_option("--marker-weight", cfg.marker_weight, "synth: marker word strength")->capture_default_str();
  app.add_option("--human-marker-weight", cfg.human_marker_weight, "synth: human marker strength (multi)");
  app.add_option("--jobs", jobs, "Worker thread cap (0: all cores)");
  app.add_option("--out", out, "Output directory")->capture_default_str();

  using Command = std::function<void(const RunConfig&, const attribkit::Logger&)>;
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"stats", "Per-class word frequencies and word clouds", attribkit::cmd_stats},
      {"train", "Split, featurize, train and evaluate a model",
       [](const RunConfig& c, const attribkit::Logger& l) { attribkit::cmd_train(c, l); }},
      {"predict", "Label documents with a trained model", attribkit::cmd_predict},
      {"explain", "Local explanations for single documents", attribkit::cmd_explain},
      {"evaluate", "Metrics, confusion matrix and ROC on labeled documents",
       [](const RunConfig& c, const attribkit::Logger& l) { attribkit::cmd_evaluate(c, l); }},
      {"profile", "Aggregated per-class feature importance", attribkit::cmd_profile},
      {"compare", "Compare against the baseline and an external detector",
       [](const RunConfig& c, const attribkit::Logger& l) { attribkit::cmd_compare(c, l); }},
      {"synth", "Generate a synthetic labeled corpus", attribkit::cmd_synth},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& p : inputs) cfg.inputs.emplace_back(p);
  cfg.out = out;
  cfg.task = *attribkit::parse_task(task);
  cfg.model = *attribkit::parse_model_kind(model);
  cfg.average = *attribkit::parse_averaging(average);
  cfg.model_dir = model_dir;
  if (!fixtures_dir.empty()) cfg.fixtures_dir = fixtures_dir;
  if (!detector_config.empty()) cfg.detector_config = detector_config;
  if (!stopwords.empty()) cfg.stopwords = stopwords;
  attribkit::set_max_jobs(jobs);

  const char* api_key = std::getenv("ATTRIBKIT_API_KEY");
  const std::string secret = api_key ? api_key : "";
  const attribkit::Logger log = [&](const std::string& line) { std::cerr << attribkit::redact(line, secret) << "\n"; };

  try {
    for (const auto& [name, help, fn] : commands)
      if (app.got_subcommand(name)) fn(cfg, log);
  } catch (const attribkit::Error& e) {
    std::cerr << "error (" << attribkit::to_string(e.kind()) << "): " << attribkit::redact(e.what(), secret) << "\n";
    return attribkit::exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << attribkit::redact(e.what(), secret) << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << attribkit::redact(e.what(), secret) << "\n";
    return 2;
  }
  return 0;
}
