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

#include <string>
#include <string_view>
#include <vector>

namespace attribkit::svg {

// Minimal SVG writer. Output carries no timestamps or generator ids, so
// identical inputs give identical bytes.

std::string escape(std::string_view text);
/// Fixed-precision decimal, locale independent.
std::string num(double v, int precision = 2);

struct Bar {
  std::string label;
  double value = 0.0;  // signed; negative bars extend left of the axis
};

/// Horizontal bar chart, one row per bar in the given order.
std::string bar_chart(const std::string& title, const std::vector<Bar>& bars);

/// Heatmap of a square matrix; each cell prints its value with `precision` decimals.
std::string heatmap(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<std::vector<double>>& values, double max_value, int precision);

struct CloudItem {
  std::string word;
  double weight = 0.0;  // (0, 1]
};

/// Word cloud laid out on a deterministic spiral; font size scales with weight.
std::string word_cloud(const std::string& title, const std::vector<CloudItem>& items);

}  // namespace attribkit::svg
