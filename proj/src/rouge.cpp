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

#include <map>

#include "tweetsum/eval.hpp"
#include "tweetsum/preprocess.hpp"
#include "tweetsum/text.hpp"

namespace tweetsum {

namespace {

using NgramCounts = std::map<std::vector<std::string_view>, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& words, int n,
                         std::size_t& total) {
  NgramCounts counts;
  total = 0;
  const auto width = static_cast<std::size_t>(n);
  if (words.size() < width) return counts;
  for (std::size_t i = 0; i + width <= words.size(); ++i) {
    std::vector<std::string_view> gram(words.begin() + i,
                                       words.begin() + i + width);
    ++counts[std::move(gram)];
    ++total;
  }
  return counts;
}

}  // namespace

RougeScore rouge_from_counts(std::size_t overlap, std::size_t candidate_count,
                             std::size_t reference_count) {
  RougeScore s;
  s.overlap = overlap;
  s.candidate_count = candidate_count;
  s.reference_count = reference_count;
  if (candidate_count > 0) {
    s.precision =
        static_cast<double>(overlap) / static_cast<double>(candidate_count);
  }
  if (reference_count > 0) {
    s.recall =
        static_cast<double>(overlap) / static_cast<double>(reference_count);
  }
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

std::vector<std::string> evaluation_words(std::string_view text) {
  const std::string normalized = normalize(text);
  std::vector<std::string> words;
  for (std::string_view w : split_whitespace(normalized)) words.emplace_back(w);
  return words;
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference,
                   int n) {
  const auto cand_words = evaluation_words(candidate);
  const auto ref_words = evaluation_words(reference);
  std::size_t cand_total = 0;
  std::size_t ref_total = 0;
  const NgramCounts cand = count_ngrams(cand_words, n, cand_total);
  const NgramCounts ref = count_ngrams(ref_words, n, ref_total);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    const auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  return rouge_from_counts(overlap, cand_total, ref_total);
}

}  // namespace tweetsum
