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

#include "attribkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace attribkit::svg {

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v, int precision) {
  if (v == 0.0) v = 0.0;  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  std::string s(buf);
  if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

namespace {

std::string header(double width, double height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width, 0) + "\" height=\"" + num(height, 0) +
         "\" viewBox=\"0 0 " + num(width, 0) + " " + num(height, 0) +
         "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, std::string_view s, double size, std::string_view anchor = "start",
                 std::string_view extra = {}) {
  std::string out = "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size, 1) + "\"";
  if (anchor != "start") out += " text-anchor=\"" + std::string(anchor) + "\"";
  if (!extra.empty()) out += " " + std::string(extra);
  return out + ">" + escape(s) + "</text>\n";
}

// Crude advance-width estimate; good enough for layout of short words.
double text_width(std::string_view s, double size) { return 0.6 * size * static_cast<double>(s.size()); }

}  // namespace

std::string bar_chart(const std::string& title, const std::vector<Bar>& bars) {
  constexpr double kRow = 26, kTop = 50, kLabelW = 160, kPlotW = 420, kPad = 20;
  double max_abs = 0.0;
  bool any_negative = false;
  for (const auto& b : bars) {
    max_abs = std::max(max_abs, std::abs(b.value));
    any_negative = any_negative || b.value < 0;
  }
  if (max_abs == 0.0) max_abs = 1.0;
  const double width = kPad + kLabelW + kPlotW + 80;
  const double height = kTop + kRow * static_cast<double>(bars.size()) + kPad;
  // With negative values the axis sits mid-plot.
  const double axis = kPad + kLabelW + (any_negative ? kPlotW / 2 : 0.0);
  const double scale = (any_negative ? kPlotW / 2 : kPlotW) / max_abs;

  std::string out = header(width, height);
  out += text(width / 2, 28, title, 16, "middle", "font-weight=\"bold\"");
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double y = kTop + kRow * static_cast<double>(i);
    const double len = std::abs(b.value) * scale;
    const double x = b.value < 0 ? axis - len : axis;
    out += "<rect x=\"" + num(x) + "\" y=\"" + num(y + 4) + "\" width=\"" + num(len) + "\" height=\"" +
           num(kRow - 8) + "\" fill=\"" + (b.value < 0 ? "#d9534f" : "#4a90d9") + "\"/>\n";
    out += text(kPad + kLabelW - 8, y + kRow / 2 + 4, b.label, 12, "end");
    out += text(b.value < 0 ? x - 4 : x + len + 4, y + kRow / 2 + 4, num(b.value, 4), 10,
                b.value < 0 ? "end" : "start");
  }
  out += "<line x1=\"" + num(axis) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(axis) + "\" y2=\"" +
         num(height - kPad) + "\" stroke=\"black\"/>\n";
  return out + "</svg>\n";
}

std::string heatmap(const std::string& title, const std::vector<std::string>& labels,
                    const std::vector<std::vector<double>>& values, double max_value, int precision) {
  constexpr double kCell = 64, kLeft = 110, kTop = 90, kPad = 20;
  const double n = static_cast<double>(labels.size());
  const double width = kLeft + kCell * n + kPad;
  const double height = kTop + kCell * n + kPad + 24;
  if (max_value <= 0) max_value = 1.0;

  std::string out = header(width, height);
  out += text(width / 2, 24, title, 16, "middle", "font-weight=\"bold\"");
  out += text(kLeft + kCell * n / 2, 50, "predicted", 12, "middle");
  out += text(14, kTop + kCell * n / 2, "true", 12, "middle",
              "transform=\"rotate(-90 14 " + num(kTop + kCell * n / 2) + ")\"");
  for (std::size_t j = 0; j < labels.size(); ++j)
    out += text(kLeft + kCell * (static_cast<double>(j) + 0.5), kTop - 10, labels[j], 11, "middle");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = kTop + kCell * static_cast<double>(i);
    out += text(kLeft - 8, y + kCell / 2 + 4, labels[i], 11, "end");
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const double v = i < values.size() && j < values[i].size() ? values[i][j] : 0.0;
      const double t = std::clamp(v / max_value, 0.0, 1.0);
      // White to dark blue.
      const int r = static_cast<int>(std::lround(255 - t * (255 - 8)));
      const int g = static_cast<int>(std::lround(255 - t * (255 - 48)));
      const int b = static_cast<int>(std::lround(255 - t * (255 - 107)));
      char fill[16];
      std::snprintf(fill, sizeof fill, "#%02x%02x%02x", r, g, b);
      const double x = kLeft + kCell * static_cast<double>(j);
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(kCell) + "\" height=\"" + num(kCell) +
             "\" fill=\"" + fill + "\" stroke=\"#999\"/>\n";
      out += text(x + kCell / 2, y + kCell / 2 + 4, num(v, precision), 11, "middle",
                  t > 0.5 ? "fill=\"white\"" : "fill=\"black\"");
    }
  }
  return out + "</svg>\n";
}

std::string word_cloud(const std::string& title, const std::vector<CloudItem>& items) {
  constexpr double kW = 640, kH = 420, kMin = 12, kMax = 56;
  struct Box {
    double x0, y0, x1, y1;
    bool hits(const Box& o) const { return !(x1 < o.x0 || o.x1 < x0 || y1 < o.y0 || o.y1 < y0); }
  };
  std::vector<Box> placed;
  std::string out = header(kW, kH);
  out += text(kW / 2, 26, title, 16, "middle", "font-weight=\"bold\"");
  static const char* kPalette[] = {"#1f4e79", "#2e75b6", "#c55a11", "#548235", "#7030a0", "#bf9000"};
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double size = kMin + (kMax - kMin) * std::clamp(items[i].weight, 0.0, 1.0);
    const double w = text_width(items[i].word, size), h = size;
    // Archimedean spiral from the centre until the box fits.
    for (int step = 0; step < 4000; ++step) {
      const double a = 0.1 * step, r = 2.0 * a;
      const double cx = kW / 2 + r * std::cos(a), cy = kH / 2 + 15 + 0.6 * r * std::sin(a);
      Box b{cx - w / 2, cy - h * 0.8, cx + w / 2, cy + h * 0.2};
      if (b.x0 < 4 || b.x1 > kW - 4 || b.y0 < 40 || b.y1 > kH - 4) continue;
      if (std::any_of(placed.begin(), placed.end(), [&](const Box& o) { return b.hits(o); })) continue;
      placed.push_back(b);
      out += text(cx, cy, items[i].word, size, "middle",
                  std::string("fill=\"") + kPalette[i % (sizeof kPalette / sizeof *kPalette)] + "\"");
      break;
    }
  }
  return out + "</svg>\n";
}

}  // namespace attribkit::svg
