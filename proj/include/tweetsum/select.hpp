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
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tweetsum/context.hpp"
#include "tweetsum/embed.hpp"
#include "tweetsum/ingest.hpp"
#include "tweetsum/salience.hpp"

namespace tweetsum {

struct SummaryEntry {
  std::uint64_t tweet_id = 0;
  std::string text;
  double salience = 0.0;
  std::size_t day_index = 0;
  std::size_t words = 0;
  EmbeddingVec embedding;  // not serialized; recomputed on restore
};

/// Entries compare on their serialized fields only.
bool same_entry(const SummaryEntry& a, const SummaryEntry& b);

/// Append-only summary of one event.
class IncrementalSummary {
 public:
  void append(SummaryEntry entry);

  const std::vector<SummaryEntry>& entries() const { return entries_; }
  std::size_t word_length() const { return word_length_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<SummaryEntry> entries_;
  std::size_t word_length_ = 0;
};

enum class CapMode { kTweets, kWords };

/// Per-day output cap: "tweets:N", "words:N" or "words:gold".
struct CapSpec {
  CapMode mode = CapMode::kTweets;
  std::size_t tweets = 20;
  std::optional<std::size_t> words;  // nullopt: the day's gold length

  static CapSpec parse(std::string_view text);
  std::string to_string() const;
};

struct SelectionConfig {
  double lambda_salience = 0.2;
  double lambda_sim_base = 0.3;
  CapSpec cap;
};

inline constexpr std::size_t kAdaptiveKnee = 50;

/// base while the summary is shorter than 50 words, then
/// base * log(50) / log(length).
double adaptive_lambda(std::size_t summary_words, double base = 0.3);

/// Cosine of two provider embeddings; 0 if either is the zero vector.
double similarity(std::span<const double> candidate,
                  std::span<const double> member);

struct Candidate {
  const Tweet* tweet = nullptr;
  double salience = 0.0;  // already clamped to [0, 1]
  EmbeddingVec embedding;
};

/// One day of selection: salience filter, salience-descending scan (id
/// ascending on ties), redundancy filter against every summary entry, cap.
/// `day_word_budget` is only read in words mode.
std::vector<SummaryEntry> step_increment(IncrementalSummary& summary,
                                         std::span<const Candidate> batch,
                                         std::size_t day_index,
                                         const SelectionConfig& config,
                                         std::size_t day_word_budget = 0);

/// Runs an event day by day: causal frequency context per tweet, eval-mode
/// salience, then step_increment. State can be saved between days and
/// resumed.
class EventSummarizer {
 public:
  EventSummarizer(std::string event_id, const SalienceNet& net,
                  const Vocab& vocab, const EmbeddingProvider& provider,
                  SelectionConfig config, const GoldStandard* gold = nullptr);

  std::vector<SummaryEntry> process_day(const DayBatch& day);

  const IncrementalSummary& summary() const { return summary_; }
  const FrequencyTracker& tracker() const { return tracker_; }
  const std::string& event_id() const { return event_id_; }

  /// Writes `tracker.fqt` and `summary.jsonl` under `dir`.
  void save_state(const std::filesystem::path& dir) const;
  void restore_state(const std::filesystem::path& dir);

 private:
  std::size_t day_budget(std::size_t day_index) const;

  std::string event_id_;
  const SalienceNet& net_;
  const Vocab& vocab_;
  const EmbeddingProvider& provider_;
  SelectionConfig config_;
  const GoldStandard* gold_;
  FrequencyTracker tracker_;
  IncrementalSummary summary_;
};

struct EventSummary {
  IncrementalSummary summary;
  std::vector<std::vector<SummaryEntry>> deltas;  // one per day
};

EventSummary summarize_event(std::span<const DayBatch> days,
                             const SalienceNet& net, const Vocab& vocab,
                             const EmbeddingProvider& provider,
                             const SelectionConfig& config,
                             const GoldStandard* gold = nullptr);

// Summary files: JSON Lines, an optional {"manifest": ...} header followed by
// one {"event", "day", "id", "salience", "text"} object per entry.

struct SummaryRecord {
  std::string event_id;
  std::size_t day = 0;
  std::uint64_t tweet_id = 0;
  double salience = 0.0;
  std::string text;
};

void write_summary_header(std::ostream& out, const nlohmann::json& manifest);
void write_summary_entries(std::ostream& out, const std::string& event_id,
                           std::span<const SummaryEntry> entries);

struct SummaryFile {
  nlohmann::json manifest;  // null when absent
  std::vector<SummaryRecord> records;
};

SummaryFile read_summary(std::istream& in);
SummaryFile read_summary(const std::filesystem::path& path);

}  // namespace tweetsum
