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

#include "attribkit/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace attribkit {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) { buf_.append(s); }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string_view data, std::string source) : data_(data), source_(std::move(source)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data_[pos_++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  [[noreturn]] void corrupt(const std::string& why) const {
    fail(ErrorKind::Integrity, source_ + ": corrupt model file (" + why + ")");
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) corrupt("unexpected end of data");
  }
  std::string_view data_;
  std::string source_;
  std::size_t pos_ = 0;
};

void write_nodes(Writer& w, const std::vector<TreeNode>& nodes) { w.u32(static_cast<std::uint32_t>(nodes.size())); }

void write_node(Writer& w, const TreeNode& n) {
  w.u8(n.is_leaf() ? 1 : 0);
  w.i32(n.feature);
  w.f64(n.threshold);
  w.i32(n.left);
  w.i32(n.right);
}

TreeNode read_node(Reader& r, std::size_t n_nodes, std::uint32_t dimension) {
  TreeNode n;
  const auto kind = r.u8();
  n.feature = r.i32();
  n.threshold = r.f64();
  n.left = r.i32();
  n.right = r.i32();
  if (kind == 1) {
    if (n.feature != -1) r.corrupt("leaf with a split feature");
    return n;
  }
  if (kind != 0) r.corrupt("unknown node kind");
  if (n.feature < 0 || static_cast<std::uint32_t>(n.feature) >= dimension) r.corrupt("split feature out of range");
  if (n.left <= 0 || n.right <= 0 || static_cast<std::size_t>(n.left) >= n_nodes ||
      static_cast<std::size_t>(n.right) >= n_nodes)
    r.corrupt("child offset out of range");
  if (!std::isfinite(n.threshold)) r.corrupt("non-finite threshold");
  return n;
}

}  // namespace

std::string serialize_model(const Classifier& model) {
  Writer w;
  w.bytes(kModelMagic);
  w.u32(kModelFormatVersion);
  const std::string meta = model.metadata().to_json().dump();
  w.u64(meta.size());
  w.bytes(meta);
  w.u8(static_cast<std::uint8_t>(model.metadata().kind));

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ForestModel>) {
          w.u32(static_cast<std::uint32_t>(m.n_classes));
          w.u32(m.dimension);
          w.u32(static_cast<std::uint32_t>(m.trees.size()));
          for (const auto& t : m.trees) {
            write_nodes(w, t.nodes);
            for (std::size_t i = 0; i < t.nodes.size(); ++i) {
              write_node(w, t.nodes[i]);
              if (t.nodes[i].is_leaf())
                for (auto c : t.counts_at(i)) w.u32(c);
            }
          }
        } else if constexpr (std::is_same_v<T, BoostedModel>) {
          w.u32(static_cast<std::uint32_t>(m.n_classes));
          w.u32(m.dimension);
          w.u32(static_cast<std::uint32_t>(m.n_outputs));
          for (double b : m.base_margin) w.f64(b);
          w.f64(m.params.learning_rate);
          w.u32(static_cast<std::uint32_t>(m.n_rounds()));
          for (const auto& t : m.trees) {
            write_nodes(w, t.nodes);
            for (const auto& n : t.nodes) {
              write_node(w, n);
              if (n.is_leaf()) w.f64(t.leaf_values[n.leaf]);
            }
          }
        } else {
          w.u32(static_cast<std::uint32_t>(m.n_classes));
          w.u32(m.dimension);
          for (double x : m.weights) w.f64(x);
          for (double x : m.bias) w.f64(x);
        }
      },
      model.model());

  Fnv1a64 h;
  h.update(w.buffer());
  w.u64(h.digest());
  return std::move(w.buffer());
}

Classifier deserialize_model(std::string_view bytes, std::string_view source_name) {
  const std::string src(source_name);
  if (bytes.size() < kModelMagic.size() || bytes.substr(0, kModelMagic.size()) != kModelMagic)
    fail(ErrorKind::Integrity, src + ": not an attribkit model file (bad magic)");
  if (bytes.size() < kModelMagic.size() + 4 + 8)
    fail(ErrorKind::Integrity, src + ": corrupt model file (truncated header)");

  Reader r(bytes, src);
  r.bytes(kModelMagic.size());
  const auto version = r.u32();
  if (version != kModelFormatVersion)
    fail(ErrorKind::Integrity, src + ": model format version " + std::to_string(version) +
                                   " is not supported (expected " + std::to_string(kModelFormatVersion) + ")");

  Fnv1a64 h;
  h.update(bytes.substr(0, bytes.size() - 8));
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i)
    stored |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes[bytes.size() - 8 + static_cast<std::size_t>(i)]))
              << (8 * i);
  if (stored != h.digest())
    fail(ErrorKind::Integrity, src + ": model file failed its integrity check (truncated or modified)");

  const auto meta_len = r.u64();
  if (meta_len > r.remaining()) r.corrupt("metadata length exceeds file size");
  nlohmann::json meta_json;
  try {
    meta_json = nlohmann::json::parse(r.bytes(meta_len));
  } catch (const nlohmann::json::exception& e) {
    r.corrupt(std::string("metadata is not JSON: ") + e.what());
  }
  auto meta = ModelMetadata::from_json(meta_json);
  const auto kind = r.u8();
  if (kind > 2) r.corrupt("unknown model kind");

  Classifier::Variant model;
  if (kind == static_cast<std::uint8_t>(ModelKind::Forest)) {
    ForestModel m;
    m.n_classes = static_cast<int>(r.u32());
    m.dimension = r.u32();
    const auto n_trees = r.u32();
    if (m.n_classes < 2 || m.n_classes > 1024) r.corrupt("implausible class count");
    for (std::uint32_t t = 0; t < n_trees; ++t) {
      ClassificationTree tree;
      tree.n_classes = m.n_classes;
      const auto n_nodes = r.u32();
      if (n_nodes == 0 || n_nodes > r.remaining()) r.corrupt("bad node count");
      for (std::uint32_t i = 0; i < n_nodes; ++i) {
        auto node = read_node(r, n_nodes, m.dimension);
        if (node.is_leaf()) {
          node.leaf = static_cast<std::uint32_t>(tree.n_leaves());
          for (int k = 0; k < m.n_classes; ++k) tree.leaf_counts.push_back(r.u32());
        }
        tree.nodes.push_back(node);
      }
      m.trees.push_back(std::move(tree));
    }
    if (meta.hyperparameters.is_object()) {
      const auto& hp = meta.hyperparameters;
      m.params.n_trees = hp.value("n_trees", m.trees.size());
      m.params.seed = hp.value("seed", kDefaultSeed);
    }
    model = std::move(m);
  } else if (kind == static_cast<std::uint8_t>(ModelKind::Boosted)) {
    BoostedModel m;
    m.n_classes = static_cast<int>(r.u32());
    m.dimension = r.u32();
    m.n_outputs = r.u32();
    if (m.n_classes < 2 || m.n_outputs == 0 || m.n_outputs > static_cast<std::size_t>(m.n_classes))
      r.corrupt("implausible output count");
    for (std::size_t k = 0; k < m.n_outputs; ++k) m.base_margin.push_back(r.f64());
    m.params.learning_rate = r.f64();
    const auto rounds = r.u32();
    for (std::size_t t = 0; t < static_cast<std::size_t>(rounds) * m.n_outputs; ++t) {
      RegressionTree tree;
      const auto n_nodes = r.u32();
      if (n_nodes == 0 || n_nodes > r.remaining()) r.corrupt("bad node count");
      for (std::uint32_t i = 0; i < n_nodes; ++i) {
        auto node = read_node(r, n_nodes, m.dimension);
        if (node.is_leaf()) {
          node.leaf = static_cast<std::uint32_t>(tree.leaf_values.size());
          tree.leaf_values.push_back(r.f64());
        }
        tree.nodes.push_back(node);
      }
      m.trees.push_back(std::move(tree));
    }
    m.params.n_rounds = rounds;
    model = std::move(m);
  } else {
    LinearModel m;
    m.n_classes = r.u32();
    m.dimension = r.u32();
    const auto cells = static_cast<std::uint64_t>(m.n_classes) * m.dimension;
    if (cells * 8 > r.remaining()) r.corrupt("weight matrix exceeds file size");
    m.weights.resize(cells);
    for (auto& x : m.weights) x = r.f64();
    m.bias.resize(m.n_classes);
    for (auto& x : m.bias) x = r.f64();
    model = std::move(m);
  }
  if (r.remaining() != 8) r.corrupt("trailing bytes after model payload");
  return Classifier(std::move(meta), std::move(model));
}

void save_model(const Classifier& model, const std::filesystem::path& path) {
  write_file(path, serialize_model(model));
}

LoadedModel load_model(const std::filesystem::path& path, const LoadOptions& options) {
  LoadedModel loaded{deserialize_model(read_file(path), path.string()), {}};
  const auto& meta = loaded.model.metadata();
  if (options.expected_vocabulary_hash || options.expected_stopword_hash) {
    loaded.warnings = loaded.model.check_compatibility(options.expected_vocabulary_hash.value_or(meta.vocabulary_hash),
                                                       options.expected_stopword_hash.value_or(meta.stopword_hash),
                                                       options.allow_mismatch);
  }
  return loaded;
}

}  // namespace attribkit
