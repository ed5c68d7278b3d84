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

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "attribkit/commands.hpp"
#include "doctest.h"
#include "nlohmann/json.hpp"
#include "test_util.hpp"

using namespace attribkit;
namespace fs = std::filesystem;

namespace {

const Logger quiet = [](const std::string&) {};

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

/// Synthetic binary corpus written once per process.
const fs::path& synthetic_input() {
  static const fs::path path = [] {
    RunConfig cfg;
    cfg.out = scratch_dir("cli-synth");
    cmd_synth(cfg, quiet);
    return cfg.out / "synthetic-binary.jsonl";
  }();
  return path;
}

RunConfig train_config(const fs::path& out) {
  RunConfig cfg;
  cfg.inputs = {synthetic_input()};
  cfg.n_trees = 12;
  cfg.lime_samples = 200;
  cfg.out = out;
  return cfg;
}

/// A trained model directory shared by the commands that consume one.
const fs::path& trained_dir() {
  static const fs::path dir = [] {
    const auto d = scratch_dir("cli-trained");
    cmd_train(train_config(d), quiet);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ATTRIBKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("synth writes a loadable corpus in both formats") {
    const auto c = load_labeled_jsonl(synthetic_input());
    CHECK(c.size() == 600);
    RunConfig cfg;
    cfg.format = "csv";
    cfg.out = scratch_dir("cli-synth-csv");
    cmd_synth(cfg, quiet);
    const auto k = load_kaggle_csv(cfg.out / "synthetic-binary.csv");
    CHECK(k.size() == 600);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(k.documents[i].category == c.documents[i].category);
  }

  TEST_CASE("train writes every artifact and reruns byte-identically") {
    const auto& a = trained_dir();
    const auto b = scratch_dir("cli-trained-again");
    const auto res = cmd_train(train_config(b), quiet);
    CHECK(res.model_path == b / "model.bin");
    CHECK(res.report.accuracy > 0.9);
    for (const char* f : {"model.bin", "vocab.tsv", "split.json", "report.md", "report.json", "metrics.csv",
                          "confusion.csv", "confusion.svg", "train.log"}) {
      INFO(f);
      REQUIRE(fs::exists(a / f));
      CHECK(read_file(a / f) == read_file(b / f));
    }
    const auto split = nlohmann::json::parse(read_file(a / "split.json"));
    CHECK(split.at("test").size() == 120);
    CHECK(split.at("train").size() == 480);
  }

  TEST_CASE("evaluate on the recorded test split reproduces the training report") {
    auto cfg = train_config(scratch_dir("cli-evaluate"));
    cfg.model_dir = trained_dir();
    cfg.split = "test";
    const auto rep = cmd_evaluate(cfg, quiet);
    CHECK(rep.n_rows == 120);
    CHECK(read_file(cfg.out / "report.json") == read_file(trained_dir() / "report.json"));
    cfg.split = "both";
    CHECK(error_of([&] { cmd_evaluate(cfg, quiet); }).kind == ErrorKind::Validation);
  }

  TEST_CASE("predict writes one row per document") {
    auto cfg = train_config(scratch_dir("cli-predict"));
    cfg.model_dir = trained_dir();
    cmd_predict(cfg, quiet);
    const auto csv = read_file(cfg.out / "predictions.csv");
    CHECK(csv.rfind("id,predicted,p_human,p_llms\n", 0) == 0);
    CHECK(line_count(csv) == 601);
  }

  TEST_CASE("stats writes per-class tables and clouds") {
    auto cfg = train_config(scratch_dir("cli-stats"));
    cmd_stats(cfg, quiet);
    for (const char* c : {"human", "llms"}) {
      const auto csv = read_file(cfg.out / "stats" / (std::string("freq-") + c + ".csv"));
      CHECK(line_count(csv) == 11);
      CHECK(read_file(cfg.out / "stats" / (std::string("cloud-") + c + ".svg")).rfind("<svg", 0) == 0);
    }
  }

  TEST_CASE("multi-class training rejects unlabeled tools") {
    RunConfig cfg;
    cfg.inputs = {test_data("kaggle_small.csv")};
    cfg.task = Task::Multi;
    cfg.out = scratch_dir("cli-multi-kaggle");
    const auto e = error_of([&] { cmd_train(cfg, quiet); });
    CHECK(e.kind == ErrorKind::Validation);
    CHECK(e.message.find("b7") != std::string::npos);
  }

  TEST_CASE("explain records failures and keeps going") {
    const auto dir = scratch_dir("cli-explain");
    Corpus c;
    c.documents.push_back({"oov", 0, "Qwzxv plorkt zzyzx.", Category::Human, Subcategory::Human});
    for (const auto& d : load_labeled_jsonl(synthetic_input()).documents)
      if (c.size() < 3) c.documents.push_back(d);
    save_labeled_jsonl(c, dir / "in.jsonl");

    auto cfg = train_config(dir);
    cfg.inputs = {dir / "in.jsonl"};
    cfg.model_dir = trained_dir();
    std::vector<std::string> lines;
    cmd_explain(cfg, [&](const std::string& l) { lines.push_back(l); });
    const auto summary = nlohmann::json::parse(read_file(dir / "explain" / "summary.json"));
    REQUIRE(summary.size() == 3);
    CHECK(summary[0].at("status") == "error");
    CHECK(summary[1].at("status") == "ok");
    CHECK(summary[2].at("status") == "ok");
    CHECK(lines.back() == "explain: 2 explained, 1 failed");
    const auto id = summary[1].at("id").get<std::string>();
    const auto e = nlohmann::json::parse(read_file(dir / "explain" / (id + ".json")));
    CHECK(e.at("explanation").at("words").size() == 10);
    CHECK(fs::exists(dir / "explain" / (id + ".svg")));

    cfg.ids = {"nope"};
    CHECK(error_of([&] { cmd_explain(cfg, quiet); }).kind == ErrorKind::Validation);
  }

  TEST_CASE("profile aggregates each class") {
    auto cfg = train_config(scratch_dir("cli-profile"));
    cfg.model_dir = trained_dir();
    cfg.max_docs = 3;
    cmd_profile(cfg, quiet);
    for (const char* c : {"human", "llms"}) {
      const auto j = nlohmann::json::parse(read_file(cfg.out / "profile" / (std::string(c) + ".json")));
      CHECK(j.at("n_instances_aggregated") == 3);
    }
  }

  TEST_CASE("a changed stopword list blocks the model unless overridden") {
    const auto dir = scratch_dir("cli-mismatch");
    write_file(dir / "stop.txt", "the\nand\n");
    auto cfg = train_config(dir);
    cfg.model_dir = trained_dir();
    cfg.stopwords = dir / "stop.txt";
    std::vector<std::string> lines;
    const auto e = error_of([&] { cmd_predict(cfg, [&](const std::string& l) { lines.push_back(l); }); });
    CHECK(e.kind == ErrorKind::Validation);
    CHECK(e.message.find("--allow-mismatch") != std::string::npos);
    REQUIRE_FALSE(lines.empty());
    CHECK(lines.front().rfind("warning:", 0) == 0);
    cfg.allow_mismatch = true;
    cmd_predict(cfg, quiet);
    CHECK(fs::exists(dir / "predictions.csv"));
  }

  TEST_CASE("compare uses fixtures for the external detector") {
    const auto dir = scratch_dir("cli-compare");
    const auto split = nlohmann::json::parse(read_file(trained_dir() / "split.json"));
    const auto test_ids = split.at("test").get<std::vector<std::string>>();
    for (const auto& id : test_ids)
      write_file(dir / "fx" / (id + ".json"), R"({"ai_percentage": 50})");
    auto cfg = train_config(dir);
    cfg.model_dir = trained_dir();
    cfg.fixtures_dir = dir / "fx";
    const auto rep = cmd_compare(cfg, quiet);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].total == 120);
    CHECK(rep.rows[0].correct == 0);  // Mix is never counted as correct
    CHECK(rep.rows[2].internal);
    CHECK(rep.rows[2].accuracy() > 0.9);
    CHECK(line_count(read_file(dir / "verdicts.csv")) == 121);
    CHECK(fs::exists(dir / "comparison.md"));

    fs::remove(dir / "fx" / (test_ids[5] + ".json"));
    CHECK(error_of([&] { cmd_compare(cfg, quiet); }).kind == ErrorKind::Io);
  }

  TEST_CASE("executable exit codes") {
    const auto dir = scratch_dir("cli-exit");
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("train --model bogus --input x.jsonl") == 2);
    CHECK(run_cli("train --input " + (dir / "missing.jsonl").string() + " --out " + dir.string()) == 3);
    CHECK(run_cli("train --task multi --input " + test_data("kaggle_small.csv").string() + " --out " + dir.string()) ==
          2);
    CHECK(run_cli("synth --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "synthetic-binary.jsonl"));
  }
}
