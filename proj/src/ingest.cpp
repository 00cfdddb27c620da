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

#include "tweetsum/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "tweetsum/error.hpp"
#include "tweetsum/text.hpp"

namespace tweetsum {

namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::string line_warning(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

std::int64_t floor_day(std::int64_t ts) {
  std::int64_t day = ts / kSecondsPerDay;
  if (ts % kSecondsPerDay < 0) --day;
  return day;
}

}  // namespace

StreamReadResult parse_stream(std::istream& in) {
  StreamReadResult result;
  std::set<std::pair<std::string, std::uint64_t>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++result.lines;
    auto skip = [&](const std::string& why) {
      ++result.skipped;
      result.warnings.push_back(line_warning(line_no, why));
    };
    const json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!record.is_object()) {
      skip("not a JSON object");
      continue;
    }
    const auto id = record.find("id");
    const auto event = record.find("event");
    const auto ts = record.find("timestamp");
    const auto text = record.find("text");
    if (id == record.end() || !id->is_number_unsigned()) {
      skip("missing or invalid \"id\"");
      continue;
    }
    if (event == record.end() || !event->is_string()) {
      skip("missing or invalid \"event\"");
      continue;
    }
    if (ts == record.end() || !ts->is_number_unsigned()) {
      skip("missing or invalid \"timestamp\"");
      continue;
    }
    if (text == record.end() || !text->is_string()) {
      skip("missing or invalid \"text\"");
      continue;
    }
    Tweet tweet{id->get<std::uint64_t>(), event->get<std::string>(),
                ts->get<std::int64_t>(), text->get<std::string>()};
    if (trim(tweet.text).empty()) {
      skip("empty text");
      continue;
    }
    if (!seen.emplace(tweet.event_id, tweet.id).second) {
      skip("duplicate id " + std::to_string(tweet.id) + " in event " +
           tweet.event_id);
      continue;
    }
    result.tweets.push_back(std::move(tweet));
  }
  if (result.lines >= kMinLinesForSkipRatio &&
      static_cast<double>(result.skipped) >
          kMaxSkippedFraction * static_cast<double>(result.lines)) {
    throw DataError("too many malformed records: " +
                    std::to_string(result.skipped) + " of " +
                    std::to_string(result.lines));
  }
  std::stable_sort(result.tweets.begin(), result.tweets.end(),
                   [](const Tweet& a, const Tweet& b) {
                     if (a.timestamp != b.timestamp) {
                       return a.timestamp < b.timestamp;
                     }
                     return a.id < b.id;
                   });
  return result;
}

StreamReadResult read_stream(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_stream(in);
}

std::map<std::string, std::vector<Tweet>> group_by_event(
    std::span<const Tweet> tweets) {
  std::map<std::string, std::vector<Tweet>> events;
  for (const Tweet& tweet : tweets) events[tweet.event_id].push_back(tweet);
  return events;
}

std::vector<DayBatch> partition_increments(std::span<const Tweet> tweets) {
  std::vector<DayBatch> batches;
  if (tweets.empty()) return batches;
  const std::string& event_id = tweets.front().event_id;
  std::int64_t first_day = floor_day(tweets.front().timestamp);
  std::int64_t last_day = first_day;
  for (const Tweet& tweet : tweets) {
    if (tweet.event_id != event_id) {
      throw DataError("partition_increments: mixed events \"" + event_id +
                      "\" and \"" + tweet.event_id + "\"");
    }
    first_day = std::min(first_day, floor_day(tweet.timestamp));
    last_day = std::max(last_day, floor_day(tweet.timestamp));
  }
  const auto days = static_cast<std::size_t>(last_day - first_day + 1);
  batches.reserve(days);
  for (std::size_t d = 0; d < days; ++d) {
    const std::int64_t start =
        (first_day + static_cast<std::int64_t>(d)) * kSecondsPerDay;
    batches.push_back(
        DayBatch{TimeIncrement{event_id, d, start, start + kSecondsPerDay}, {}});
  }
  for (const Tweet& tweet : tweets) {
    const auto d =
        static_cast<std::size_t>(floor_day(tweet.timestamp) - first_day);
    batches[d].tweets.push_back(tweet);
  }
  return batches;
}

bool GoldStandard::set(const std::string& event_id, std::size_t day,
                       std::string text) {
  auto [it, inserted] = entries_.try_emplace(Key{event_id, day}, text);
  if (!inserted) it->second = std::move(text);
  return inserted;
}

const std::string* GoldStandard::find(const std::string& event_id,
                                      std::size_t day) const {
  const auto it = entries_.find(Key{event_id, day});
  return it == entries_.end() ? nullptr : &it->second;
}

GoldReadResult parse_gold(std::istream& in) {
  GoldReadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const json record = json::parse(line, nullptr, false);
    if (!record.is_object() || !record.contains("event") ||
        !record["event"].is_string() || !record.contains("day") ||
        !record["day"].is_number_unsigned() || !record.contains("text") ||
        !record["text"].is_string()) {
      result.warnings.push_back(line_warning(line_no, "malformed gold record"));
      continue;
    }
    auto text = record["text"].get<std::string>();
    const auto event = record["event"].get<std::string>();
    const auto day = record["day"].get<std::size_t>();
    if (trim(text).empty()) {
      result.warnings.push_back(line_warning(line_no, "empty gold text"));
      continue;
    }
    if (!result.gold.set(event, day, std::move(text))) {
      result.warnings.push_back(line_warning(
          line_no, "duplicate gold entry (" + event + ", " +
                       std::to_string(day) + "), keeping the last"));
    }
  }
  return result;
}

GoldReadResult read_gold(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_gold(in);
}

}  // namespace tweetsum
