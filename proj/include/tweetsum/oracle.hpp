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
#include <span>
#include <string_view>
#include <vector>

#include "tweetsum/eval.hpp"
#include "tweetsum/ingest.hpp"

namespace tweetsum {

enum class OracleMetric { kRouge2F, kCosine };

std::string_view oracle_metric_name(OracleMetric metric);

struct OracleResult {
  std::vector<std::uint64_t> ids;  // selection order
  std::vector<double> trace;       // metric value after each addition
};

/// Greedy extract against a gold text: repeatedly adds the tweet that most
/// increases the metric of the concatenated selection (lower id on ties),
/// never exceeding `word_budget` words, and stops as soon as no tweet gives a
/// strict improvement. The cosine metric needs `sif`.
OracleResult greedy_oracle(std::span<const Tweet> day_tweets,
                           std::string_view gold_text, OracleMetric metric,
                           std::size_t word_budget, const SifModel* sif);

}  // namespace tweetsum
