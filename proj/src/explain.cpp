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

#include "attribkit/explain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "attribkit/parallel.hpp"
#include "attribkit/svg.hpp"

namespace attribkit {

InterpretableInstance make_instance(const TokenList& doc, const Vocabulary& vocab) {
  InterpretableInstance inst;
  inst.document = doc;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& tok : doc.tokens) {
    const auto idx = vocab.index_of(tok);
    if (!idx) continue;
    auto [it, fresh] = slot.emplace(tok, inst.distinct_words.size());
    if (fresh) {
      inst.distinct_words.push_back(tok);
      inst.word_index.push_back(*idx);
      inst.word_count.push_back(0);
    }
    ++inst.word_count[it->second];
  }
  if (inst.distinct_words.empty())
    fail(ErrorKind::Validation,
         "unexplainable instance" + (doc.source_id.empty() ? std::string() : " '" + doc.source_id + "'") +
             ": no token is in the model vocabulary");
  inst.original_row = transform(doc, vocab);
  return inst;
}

double cosine_distance(const SparseVector& a, const SparseVector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  const double c = a.dot(b) / (na * nb);
  return std::clamp(1.0 - c, 0.0, 1.0);
}

SparseVector masked_row(const InterpretableInstance& instance, const std::vector<std::uint8_t>& mask,
                        const Vocabulary& vocab) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;
  counts.reserve(mask.size());
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) counts.emplace_back(instance.word_index[j], instance.word_count[j]);
  std::sort(counts.begin(), counts.end());
  return weight_counts(counts, vocab);
}

std::vector<PerturbedSample> perturb(const InterpretableInstance& instance, const Vocabulary& vocab,
                                     std::size_t n_samples, Rng& rng) {
  const std::size_t w = instance.distinct_words.size();
  if (w == 0) fail(ErrorKind::Validation, "unexplainable instance: no interpretable words");
  if (n_samples < 10) fail(ErrorKind::Validation, "perturbation needs at least 10 samples");
  std::vector<PerturbedSample> out(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto& sample = out[s];
    sample.mask.assign(w, 1);
    if (s > 0)
      for (auto& m : sample.mask) m = bernoulli(rng, 0.5) ? 1 : 0;
    sample.row = masked_row(instance, sample.mask, vocab);
    sample.distance = s == 0 ? 0.0 : cosine_distance(instance.original_row, sample.row);
  }
  return out;
}

double kernel_weight(double distance, double width) {
  if (!(width > 0.0)) fail(ErrorKind::Validation, "kernel width must be positive");
  return std::exp(-(distance * distance) / (width * width));
}

RidgeFit weighted_ridge(const std::vector<double>& design, std::size_t n, std::size_t p,
                        const std::vector<double>& target, const std::vector<double>& weights, double ridge) {
  if (design.size() != n * p || target.size() != n || weights.size() != n)
    fail(ErrorKind::Validation, "ridge inputs have inconsistent sizes");
  if (ridge < 0.0) fail(ErrorKind::Validation, "ridge strength must be non-negative");
  const std::size_t q = p + 1;  // column 0 is the intercept
  std::vector<double> a(q * q, 0.0), rhs(q, 0.0);
  std::vector<double> z(q);
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weights[i];
    if (wi == 0.0) continue;
    z[0] = 1.0;
    for (std::size_t j = 0; j < p; ++j) z[j + 1] = design[i * p + j];
    for (std::size_t r = 0; r < q; ++r) {
      if (z[r] == 0.0) continue;
      const double wz = wi * z[r];
      rhs[r] += wz * target[i];
      for (std::size_t c = 0; c <= r; ++c) a[r * q + c] += wz * z[c];
    }
  }
  for (std::size_t j = 1; j < q; ++j) a[j * q + j] += ridge;

  // In-place Cholesky, lower triangle.
  for (std::size_t j = 0; j < q; ++j) {
    double d = a[j * q + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * q + k] * a[j * q + k];
    if (!(d > 0.0)) fail(ErrorKind::Numeric, "ridge normal equations are singular");
    const double l = std::sqrt(d);
    a[j * q + j] = l;
    for (std::size_t i = j + 1; i < q; ++i) {
      double s = a[i * q + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * q + k] * a[j * q + k];
      a[i * q + j] = s / l;
    }
  }
  std::vector<double> beta(rhs);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t k = 0; k < i; ++k) beta[i] -= a[i * q + k] * beta[k];
    beta[i] /= a[i * q + i];
  }
  for (std::size_t i = q; i-- > 0;) {
    for (std::size_t k = i + 1; k < q; ++k) beta[i] -= a[k * q + i] * beta[k];
    beta[i] /= a[i * q + i];
  }

  RidgeFit fit;
  fit.intercept = beta[0];
  fit.coefficients.assign(beta.begin() + 1, beta.end());

  double sw = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += weights[i];
    swy += weights[i] * target[i];
  }
  const double mean = swy / sw;
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double yhat = fit.intercept;
    for (std::size_t j = 0; j < p; ++j) yhat += fit.coefficients[j] * design[i * p + j];
    ss_tot += weights[i] * (target[i] - mean) * (target[i] - mean);
    ss_res += weights[i] * (target[i] - yhat) * (target[i] - yhat);
  }
  // A target that is constant up to rounding is fit perfectly by the intercept.
  fit.r_squared = ss_tot <= 1e-24 * std::max(1.0, sw) ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  return fit;
}

nlohmann::ordered_json ExplainParams::to_json() const {
  return {{"top_k", top_k}, {"n_samples", n_samples}, {"kernel_width", kernel_width}, {"ridge", ridge}};
}

Explanation explain_instance(const ProbabilityModel& model, const InterpretableInstance& instance,
                             const Vocabulary& vocab, int target_class, const ExplainParams& params, Rng& rng,
                             bool parallel) {
  if (target_class < 0 || static_cast<std::size_t>(target_class) >= model.n_classes())
    fail(ErrorKind::Validation, "target class " + std::to_string(target_class) + " is outside the model's classes");
  if (model.dimension() != vocab.size())
    fail(ErrorKind::Validation, "model and vocabulary disagree on the feature dimension");
  if (params.top_k == 0) fail(ErrorKind::Validation, "top-k must be at least 1");
  kernel_weight(0.0, params.kernel_width);  // validates the width

  const auto samples = perturb(instance, vocab, params.n_samples, rng);
  const std::size_t n = samples.size(), p = instance.distinct_words.size();
  std::vector<double> design(n * p), target(n), weights(n);
  for_each_index(n, parallel, [&](std::size_t i) {
    target[i] = model.predict_proba(samples[i].row)[static_cast<std::size_t>(target_class)];
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) design[i * p + j] = samples[i].mask[j];
    weights[i] = kernel_weight(samples[i].distance, params.kernel_width);
  }
  const auto fit = weighted_ridge(design, n, p, target, weights, params.ridge);

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(fit.coefficients[a]) > std::abs(fit.coefficients[b]);
  });
  Explanation e;
  e.source_id = instance.document.source_id;
  e.target_class = target_class;
  e.intercept = fit.intercept;
  e.local_fit_quality = fit.r_squared;
  e.params = params;
  for (std::size_t r = 0; r < std::min(params.top_k, p); ++r)
    e.weighted_words.push_back({instance.distinct_words[order[r]], fit.coefficients[order[r]]});
  return e;
}

nlohmann::ordered_json Explanation::to_json() const {
  nlohmann::ordered_json words = nlohmann::ordered_json::array();
  for (const auto& w : weighted_words) words.push_back({{"word", w.word}, {"coefficient", w.coefficient}});
  nlohmann::ordered_json j;
  j["source_id"] = source_id;
  j["target_class"] = target_class;
  j["target_name"] = target_name;
  j["words"] = std::move(words);
  j["intercept"] = intercept;
  j["local_fit_quality"] = local_fit_quality;
  j["settings"] = params.to_json();
  return j;
}

std::string Explanation::to_svg() const {
  std::vector<svg::Bar> bars;
  for (const auto& w : weighted_words) bars.push_back({w.word, w.coefficient});
  std::string title = "Top " + std::to_string(bars.size()) + " features";
  if (!target_name.empty()) title += " for class '" + target_name + "'";
  if (!source_id.empty()) title += " (" + source_id + ")";
  return svg::bar_chart(title, bars);
}

namespace {

ClassProfile profile_impl(const ProbabilityModel& model, const std::vector<TokenList>& docs, const Vocabulary& vocab,
                          int class_label, const ExplainParams& params, std::uint64_t seed, bool parallel) {
  if (docs.empty()) fail(ErrorKind::Validation, "class profile needs at least one document");
  struct Slot {
    std::optional<Explanation> explanation;
    bool skipped = false;
  };
  std::vector<Slot> slots(docs.size());
  for_each_index(docs.size(), parallel, [&](std::size_t i) {
    InterpretableInstance inst;
    try {
      inst = make_instance(docs[i], vocab);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Validation) throw;
      slots[i].skipped = true;
      return;
    }
    Rng rng(derive_seed(seed, "lime", i));
    slots[i].explanation = explain_instance(model, inst, vocab, class_label, params, rng, false);
  });

  ClassProfile prof;
  prof.class_label = class_label;
  std::map<std::string, double> sum;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (slots[i].skipped) {
      prof.skipped.push_back(docs[i].source_id);
      continue;
    }
    ++prof.n_instances_aggregated;
    for (const auto& w : slots[i].explanation->weighted_words) sum[w.word] += std::abs(w.coefficient);
  }
  if (prof.n_instances_aggregated == 0) fail(ErrorKind::Validation, "no document in the sample could be explained");
  const double n = static_cast<double>(prof.n_instances_aggregated);
  for (const auto& [word, s] : sum) prof.entries.push_back({word, s / n});
  std::stable_sort(prof.entries.begin(), prof.entries.end(),
                   [](const ProfileEntry& a, const ProfileEntry& b) { return a.importance > b.importance; });
  if (prof.entries.size() > params.top_k) prof.entries.resize(params.top_k);
  return prof;
}

}  // namespace

ClassProfile class_profile(const ProbabilityModel& model, const std::vector<TokenList>& docs, const Vocabulary& vocab,
                           int class_label, const ExplainParams& params, std::uint64_t seed) {
  return profile_impl(model, docs, vocab, class_label, params, seed, true);
}

ClassProfile class_profile_serial(const ProbabilityModel& model, const std::vector<TokenList>& docs,
                                  const Vocabulary& vocab, int class_label, const ExplainParams& params,
                                  std::uint64_t seed) {
  return profile_impl(model, docs, vocab, class_label, params, seed, false);
}

nlohmann::ordered_json ClassProfile::to_json() const {
  nlohmann::ordered_json j;
  j["class_label"] = class_label;
  j["class_name"] = class_name;
  j["n_instances_aggregated"] = n_instances_aggregated;
  nlohmann::ordered_json entries_json = nlohmann::ordered_json::array();
  for (const auto& e : entries) entries_json.push_back({{"word", e.word}, {"importance", e.importance}});
  j["entries"] = std::move(entries_json);
  j["skipped"] = skipped;
  return j;
}

std::string ClassProfile::to_svg() const {
  std::vector<svg::Bar> bars;
  for (const auto& e : entries) bars.push_back({e.word, e.importance});
  return svg::bar_chart("Top " + std::to_string(bars.size()) + " features for class '" + class_name + "'", bars);
}

}  // namespace attribkit
