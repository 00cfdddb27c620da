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

#include <algorithm>

#include "tweetsum/salience.hpp"

namespace tweetsum {

double salience_target(std::string_view tweet_text, const std::string* gold,
                       bool in_oracle, const SifModel& sif) {
  if (in_oracle) return 1.0;
  if (gold == nullptr) return 0.0;
  return std::clamp(sif.cos_embed(tweet_text, *gold), 0.0, 1.0);
}

std::vector<TargetRecord> build_targets(
    std::span<const DayBatch> days, const GoldStandard& gold,
    const std::unordered_set<std::uint64_t>& oracle_ids, const SifModel& sif) {
  std::vector<TargetRecord> out;
  for (const DayBatch& day : days) {
    const std::string* reference =
        gold.find(day.increment.event_id, day.increment.day_index);
    for (const Tweet& tweet : day.tweets) {
      const bool in_oracle = oracle_ids.contains(tweet.id);
      out.push_back(TargetRecord{
          tweet.event_id, day.increment.day_index, tweet.id,
          salience_target(tweet.text, reference, in_oracle, sif), in_oracle});
    }
  }
  return out;
}

std::vector<TrainingExample> assemble_examples(
    std::span<const DayBatch> days,
    const std::map<std::uint64_t, double>& targets, const Vocab& vocab,
    const EmbeddingProvider& provider) {
  std::vector<TrainingExample> out;
  if (days.empty()) return out;
  FrequencyTracker tracker(days.front().increment.event_id, vocab);
  for (const DayBatch& day : days) {
    for (const Tweet& tweet : day.tweets) {
      const TokenSeq seq = encode(tweet, vocab);
      const auto target = targets.find(tweet.id);
      if (target != targets.end()) {
        out.push_back(TrainingExample{tracker.snapshot(),
                                      provider.embed(tweet, seq),
                                      target->second});
      }
      tracker.update(seq);
    }
  }
  return out;
}

}  // namespace tweetsum
