// Copyright 2026 The tweetsum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tweetsum {

// ---------------------------------------------------------------------------
// ROUGE-N

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t overlap = 0;
  std::size_t candidate_count = 0;
  std::size_t reference_count = 0;
};

/// P/R/F from pooled n-gram counts. An empty side makes its ratio 0.
RougeScore rouge_from_counts(std::size_t overlap, std::size_t candidate_count,
                             std::size_t reference_count);

/// Whitespace words of normalize(text); the unit for ROUGE and SIF.
std::vector<std::string> evaluation_words(std::string_view text);

/// Clipped n-gram overlap between candidate and reference, no stemming and
/// no stopword removal.
RougeScore rouge_n(std::string_view candidate, std::string_view reference,
                   int n);

// ---------------------------------------------------------------------------
// SIF sentence embeddings

class WordVectors {
 public:
  explicit WordVectors(std::size_t dimension = 0) : dimension_(dimension) {}

  /// Text format: header "count dim", then "word v1 ... vdim" per line.
  static WordVectors load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  void insert(std::string word, std::vector<double> values);
  const std::vector<double>* find(std::string_view word) const;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }

 private:
  std::size_t dimension_;
  std::vector<std::string> words_;  // insertion order, for save()
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

class WordProbs {
 public:
  /// Text format: "word probability" per line.
  static WordProbs load(const std::filesystem::path& path);

  /// Add-one smoothed unigram probabilities over evaluation_words(texts).
  /// Unseen words receive 1 / (tokens + types).
  static WordProbs estimate(std::span<const std::string> texts);

  void set(std::string word, double p) { probs_[std::move(word)] = p; }
  double prob(std::string_view word) const;
  double unseen() const { return unseen_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::unordered_map<std::string, double> probs_;
  double unseen_ = 0.0;
};

inline constexpr double kSifWeight = 1e-3;

class SifModel {
 public:
  SifModel(WordVectors vectors, WordProbs probs, double a = kSifWeight,
           bool remove_pc = true);

  /// a / (a + p(w))
  double weight(std::string_view word) const;

  /// Mean of weight(w) * vec(w) over in-vocabulary words; zero when none.
  std::vector<double> weighted_average(std::string_view text) const;

  /// Estimates the first (uncentered) principal component of the weighted
  /// averages of `texts`.
  void fit_principal_component(std::span<const std::string> texts);
  const std::optional<std::vector<double>>& principal_component() const {
    return pc_;
  }

  /// weighted_average with the principal component projected out, when
  /// enabled and fitted.
  std::vector<double> embed(std::string_view text) const;

  double cos_embed(std::string_view candidate,
                   std::string_view reference) const;

  std::size_t dimension() const { return vectors_.dimension(); }
  bool remove_pc() const { return remove_pc_; }

 private:
  WordVectors vectors_;
  WordProbs probs_;
  double a_;
  bool remove_pc_;
  std::optional<std::vector<double>> pc_;
};

// ---------------------------------------------------------------------------
// Aggregation

struct DayScores {
  std::string event_id;
  std::size_t day = 0;
  RougeScore rouge1;
  RougeScore rouge2;
  double cos_embed = 0.0;
};

DayScores score_day(std::string event_id, std::size_t day,
                    std::string_view candidate, std::string_view reference,
                    const SifModel* sif);

struct MetricAggregate {
  double micro = 0.0;
  double macro = 0.0;
};

struct Aggregates {
  MetricAggregate rouge1_f;
  MetricAggregate rouge2_f;
  MetricAggregate cos_embed;
  std::size_t days = 0;
  std::size_t events = 0;
};

/// micro: ROUGE from counts pooled over all days, cos as a plain mean.
/// macro: per-event mean of the daily values, then mean over events.
Aggregates aggregate(std::span<const DayScores> days);

// ---------------------------------------------------------------------------
// Random baseline

struct DayPool {
  std::string event_id;
  std::size_t day = 0;
  std::vector<std::string> texts;
  std::size_t word_budget = 0;
  std::string reference;
};

inline constexpr std::size_t kBaselineRuns = 50;

struct BaselineReport {
  Aggregates mean;                  // mean of the per-run aggregates
  std::vector<DayScores> day_means;  // per-day scores averaged over runs
  std::size_t runs = 0;
};

/// Each run draws tweets uniformly without replacement per day until the next
/// one would overflow the day's word budget.
BaselineReport random_baseline(std::span<const DayPool> pools,
                               const SifModel* sif,
                               std::size_t runs = kBaselineRuns,
                               std::uint64_t seed = 0);

/// The tweets a single random run keeps for one day, in draw order.
std::vector<std::size_t> random_summary(const DayPool& pool,
                                        std::uint64_t seed);

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test

inline constexpr std::size_t kWilcoxonExactMax = 25;

struct WilcoxonResult {
  double w_plus = 0.0;
  double w_minus = 0.0;
  double statistic = 0.0;  // min(w_plus, w_minus)
  double p_value = 1.0;    // two-sided
  std::size_t n = 0;       // pairs with non-zero difference
  bool exact = false;
};

/// Zero differences are dropped and tied |d| share their average rank. Exact
/// null distribution up to kWilcoxonExactMax pairs, tie-corrected normal
/// approximation above. Throws DataError when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y);

}  // namespace tweetsum
