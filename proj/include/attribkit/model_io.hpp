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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attribkit/models.hpp"

namespace attribkit {

// Container layout, all integers little-endian:
//
//   "ATTRIBKIT"            9 bytes
//   u32 format version
//   u64 metadata length, metadata JSON text
//   u8  model kind (0 forest, 1 boosted, 2 linear)
//   model payload          flat node tables / weight matrices
//   u64 FNV-1a digest of every preceding byte
//
// Node records: u8 kind (0 internal, 1 leaf), i32 feature, f64 threshold,
// i32 left, i32 right, then the leaf payload (n_classes x u32 counts for
// forests, one f64 value for boosting trees).

inline constexpr std::string_view kModelMagic = "ATTRIBKIT";
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const Classifier& model);
Classifier deserialize_model(std::string_view bytes, std::string_view source_name = "<memory>");

void save_model(const Classifier& model, const std::filesystem::path& path);

struct LoadOptions {
  /// When set, compared against the recorded hashes; a mismatch warns and
  /// blocks prediction unless allow_mismatch.
  std::optional<std::string> expected_vocabulary_hash;
  std::optional<std::string> expected_stopword_hash;
  bool allow_mismatch = false;
};

struct LoadedModel {
  Classifier model;
  std::vector<std::string> warnings;
};

LoadedModel load_model(const std::filesystem::path& path, const LoadOptions& options = {});

}  // namespace attribkit
