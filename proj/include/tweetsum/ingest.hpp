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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tweetsum {

inline constexpr std::int64_t kSecondsPerDay = 86400;

struct Tweet {
  std::uint64_t id = 0;
  std::string event_id;
  std::int64_t timestamp = 0;  // unix seconds, UTC
  std::string text;

  friend bool operator==(const Tweet&, const Tweet&) = default;
};

/// One UTC calendar day of an event stream. day_index counts from the day of
/// the event's first tweet.
struct TimeIncrement {
  std::string event_id;
  std::size_t day_index = 0;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;

  friend bool operator==(const TimeIncrement&, const TimeIncrement&) = default;
};

struct DayBatch {
  TimeIncrement increment;
  std::vector<Tweet> tweets;

  friend bool operator==(const DayBatch&, const DayBatch&) = default;
};

struct StreamReadResult {
  std::vector<Tweet> tweets;
  std::size_t lines = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// Skipped records are fatal once they exceed this share of the input...
inline constexpr double kMaxSkippedFraction = 0.10;
/// ...provided the input has at least this many non-empty lines.
inline constexpr std::size_t kMinLinesForSkipRatio = 20;

/// Parses a JSON Lines tweet stream and sorts it by (timestamp, id).
/// Records missing a field, with empty text, or repeating an id within their
/// event are skipped with a warning.
StreamReadResult parse_stream(std::istream& in);
StreamReadResult read_stream(const std::filesystem::path& path);

/// Splits a stream into its events, preserving order within each.
std::map<std::string, std::vector<Tweet>> group_by_event(
    std::span<const Tweet> tweets);

/// Assigns each tweet of a single-event, timestamp-sorted stream to its UTC
/// day. Days between the first and last tweet are emitted even when empty.
std::vector<DayBatch> partition_increments(std::span<const Tweet> tweets);

class GoldStandard {
 public:
  using Key = std::pair<std::string, std::size_t>;

  /// Returns false if the key was already present (the new text wins).
  bool set(const std::string& event_id, std::size_t day, std::string text);

  const std::string* find(const std::string& event_id, std::size_t day) const;

  std::size_t size() const { return entries_.size(); }
  const std::map<Key, std::string>& entries() const { return entries_; }

 private:
  std::map<Key, std::string> entries_;
};

struct GoldReadResult {
  GoldStandard gold;
  std::vector<std::string> warnings;
};

GoldReadResult parse_gold(std::istream& in);
GoldReadResult read_gold(const std::filesystem::path& path);

}  // namespace tweetsum
