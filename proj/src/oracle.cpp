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

#include "tweetsum/oracle.hpp"

#include <map>

#include "tweetsum/error.hpp"
#include "tweetsum/text.hpp"

namespace tweetsum {

namespace {

using Bigram = std::pair<std::string, std::string>;

// Bigram bookkeeping for ROUGE-2 of a growing concatenation. Appending a
// tweet adds its own bigrams plus the one spanning the join.
class Rouge2Tracker {
 public:
  explicit Rouge2Tracker(std::string_view gold) {
    const auto words = evaluation_words(gold);
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
      ++reference_[{words[i], words[i + 1]}];
      ++reference_total_;
    }
  }

  double score_with(const std::vector<std::string>& words) const {
    std::map<Bigram, std::size_t> added;
    std::size_t overlap = overlap_;
    std::size_t total = selected_total_;
    for_each_new_bigram(words, [&](Bigram gram) {
      ++total;
      const auto ref = reference_.find(gram);
      if (ref == reference_.end()) return;
      const std::size_t used = count_of(selected_, gram) + added[gram]++;
      if (used < ref->second) ++overlap;
    });
    return rouge_from_counts(overlap, total, reference_total_).f1;
  }

  void append(const std::vector<std::string>& words) {
    for_each_new_bigram(words, [&](Bigram gram) {
      ++selected_total_;
      const auto ref = reference_.find(gram);
      const std::size_t used = selected_[gram]++;
      if (ref != reference_.end() && used < ref->second) ++overlap_;
    });
    if (!words.empty()) last_word_ = words.back();
    has_words_ = has_words_ || !words.empty();
  }

 private:
  template <typename Fn>
  void for_each_new_bigram(const std::vector<std::string>& words,
                           Fn&& fn) const {
    if (words.empty()) return;
    if (has_words_) fn(Bigram{last_word_, words.front()});
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
      fn(Bigram{words[i], words[i + 1]});
    }
  }

  static std::size_t count_of(const std::map<Bigram, std::size_t>& counts,
                              const Bigram& gram) {
    const auto it = counts.find(gram);
    return it == counts.end() ? 0 : it->second;
  }

  std::map<Bigram, std::size_t> reference_;
  std::size_t reference_total_ = 0;
  std::map<Bigram, std::size_t> selected_;
  std::size_t selected_total_ = 0;
  std::size_t overlap_ = 0;
  std::string last_word_;
  bool has_words_ = false;
};

}  // namespace

std::string_view oracle_metric_name(OracleMetric metric) {
  return metric == OracleMetric::kRouge2F ? "rouge2_f" : "cosine";
}

OracleResult greedy_oracle(std::span<const Tweet> day_tweets,
                           std::string_view gold_text, OracleMetric metric,
                           std::size_t word_budget, const SifModel* sif) {
  OracleResult result;
  if (trim(gold_text).empty()) return result;
  if (metric == OracleMetric::kCosine && sif == nullptr) {
    throw UsageError("cosine oracle requires SIF word vectors");
  }

  const std::size_t n = day_tweets.size();
  std::vector<std::size_t> words(n);
  // A leading RT only normalizes to its stream token at the very start of
  // the concatenation, so each tweet is tokenized in both positions.
  std::vector<std::vector<std::string>> tokens_first(n);
  std::vector<std::vector<std::string>> tokens_later(n);
  for (std::size_t i = 0; i < n; ++i) {
    words[i] = word_count(day_tweets[i].text);
    if (metric == OracleMetric::kRouge2F) {
      tokens_first[i] = evaluation_words(day_tweets[i].text);
      tokens_later[i] = evaluation_words("x " + day_tweets[i].text);
      tokens_later[i].erase(tokens_later[i].begin());
    }
  }

  Rouge2Tracker rouge(metric == OracleMetric::kRouge2F ? gold_text : "");
  std::string selection_text;
  std::vector<bool> taken(n, false);
  std::size_t used_words = 0;
  double current = 0.0;

  while (true) {
    std::size_t best = n;
    double best_value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i] || used_words + words[i] > word_budget) continue;
      double value = 0.0;
      if (metric == OracleMetric::kRouge2F) {
        value = rouge.score_with(result.ids.empty() ? tokens_first[i]
                                                    : tokens_later[i]);
      } else {
        const std::string joined =
            selection_text.empty()
                ? day_tweets[i].text
                : selection_text + " " + day_tweets[i].text;
        value = sif->cos_embed(joined, gold_text);
      }
      if (best == n || value > best_value ||
          (value == best_value && day_tweets[i].id < day_tweets[best].id)) {
        best = i;
        best_value = value;
      }
    }
    if (best == n || !(best_value > current)) break;

    taken[best] = true;
    used_words += words[best];
    current = best_value;
    if (metric == OracleMetric::kRouge2F) {
      rouge.append(result.ids.empty() ? tokens_first[best] : tokens_later[best]);
    }
    if (!selection_text.empty()) selection_text += ' ';
    selection_text += day_tweets[best].text;
    result.ids.push_back(day_tweets[best].id);
    result.trace.push_back(best_value);
  }
  return result;
}

}  // namespace tweetsum
