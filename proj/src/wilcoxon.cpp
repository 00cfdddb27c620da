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
#include <cmath>
#include <numeric>

#include "tweetsum/error.hpp"
#include "tweetsum/eval.hpp"

namespace tweetsum {

namespace {

// Ranks |d| ascending; tied values share the average rank. Returned doubled so
// that every rank is an integer.
std::vector<std::uint64_t> doubled_ranks(const std::vector<double>& abs_diffs,
                                         std::vector<std::size_t>& tie_sizes) {
  const std::size_t n = abs_diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return abs_diffs[a] < abs_diffs[b];
  });
  std::vector<std::uint64_t> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && abs_diffs[order[j + 1]] == abs_diffs[order[i]]) ++j;
    // positions i..j hold ranks i+1..j+1; their average doubled is i+j+2.
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = i + j + 2;
    tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  return ranks;
}

// P(W+ <= threshold) under the null, by counting sign assignments.
double exact_lower_tail(const std::vector<std::uint64_t>& ranks,
                        std::uint64_t threshold) {
  const std::uint64_t total =
      std::accumulate(ranks.begin(), ranks.end(), std::uint64_t{0});
  std::vector<double> ways(total + 1, 0.0);
  ways[0] = 1.0;
  std::uint64_t reach = 0;
  for (std::uint64_t r : ranks) {
    reach += r;
    for (std::uint64_t s = reach; s >= r; --s) {
      ways[s] += ways[s - r];
      if (s == r) break;
    }
  }
  double below = 0.0;
  for (std::uint64_t s = 0; s <= std::min(threshold, total); ++s) {
    below += ways[s];
  }
  return below / std::ldexp(1.0, static_cast<int>(ranks.size()));
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x,
                                    std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw DataError("wilcoxon: samples must be paired and non-empty");
  }
  std::vector<double> abs_diffs;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d == 0.0) continue;
    abs_diffs.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  if (abs_diffs.empty()) {
    throw DataError("wilcoxon: degenerate sample (all differences are zero)");
  }
  std::vector<std::size_t> ties;
  const auto ranks = doubled_ranks(abs_diffs, ties);

  std::uint64_t plus2 = 0;
  std::uint64_t minus2 = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    (positive[i] ? plus2 : minus2) += ranks[i];
  }
  WilcoxonResult r;
  r.n = ranks.size();
  r.w_plus = static_cast<double>(plus2) / 2.0;
  r.w_minus = static_cast<double>(minus2) / 2.0;
  r.statistic = std::min(r.w_plus, r.w_minus);

  if (r.n <= kWilcoxonExactMax) {
    r.exact = true;
    r.p_value =
        std::min(1.0, 2.0 * exact_lower_tail(ranks, std::min(plus2, minus2)));
    return r;
  }
  const auto n = static_cast<double>(r.n);
  const double mean = n * (n + 1.0) / 4.0;
  double tie_term = 0.0;
  for (std::size_t t : ties) {
    const auto tt = static_cast<double>(t);
    tie_term += tt * tt * tt - tt;
  }
  const double variance =
      n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double z = (r.statistic - mean) / std::sqrt(variance);
  r.p_value = std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
  return r;
}

}  // namespace tweetsum
