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

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace attribkit {

/// Broad failure classes. Each maps onto one process exit code of the CLI.
enum class ErrorKind {
  Validation,  // bad input values, label inconsistencies
  Schema,      // missing columns / keys
  Parse,       // malformed rows
  Io,          // filesystem
  Numeric,     // non-finite values during training
  Integrity,   // corrupted or incompatible model files
  Transport,   // network failures talking to an external detector
  Protocol,    // unmappable detector payloads
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

/// CLI exit code for an error kind: 2 validation-like, 3 I/O-like, 4 numeric.
int exit_code_for(ErrorKind kind);

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// ---------------------------------------------------------------------------
// Hashing

/// 64-bit FNV-1a. Used for content digests (vocabulary, stopword list, model
/// integrity trailer); not a cryptographic hash.
class Fnv1a64 {
 public:
  void update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(const void* data, std::size_t n) noexcept {
    update(std::string_view(static_cast<const char*>(data), n));
  }
  std::uint64_t digest() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex64(std::uint64_t v);

// ---------------------------------------------------------------------------
// Random numbers
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions do not. Everything that must be reproducible across
// toolchains goes through the helpers below.

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for a named sub-stream ("split", "bootstrap", "lime", ...) of a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index = 0) noexcept;

/// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Seed used when the caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 42;

}  // namespace attribkit
