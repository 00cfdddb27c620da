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
#include <numeric>

#include "tweetsum/eval.hpp"
#include "tweetsum/rng.hpp"
#include "tweetsum/text.hpp"

namespace tweetsum {

DayScores score_day(std::string event_id, std::size_t day,
                    std::string_view candidate, std::string_view reference,
                    const SifModel* sif) {
  DayScores s;
  s.event_id = std::move(event_id);
  s.day = day;
  s.rouge1 = rouge_n(candidate, reference, 1);
  s.rouge2 = rouge_n(candidate, reference, 2);
  s.cos_embed = sif ? sif->cos_embed(candidate, reference) : 0.0;
  return s;
}

Aggregates aggregate(std::span<const DayScores> days) {
  Aggregates out;
  out.days = days.size();
  if (days.empty()) return out;

  std::size_t o1 = 0, c1 = 0, r1 = 0, o2 = 0, c2 = 0, r2 = 0;
  double cos_sum = 0.0;
  struct EventSums {
    double rouge1 = 0.0, rouge2 = 0.0, cos = 0.0;
    std::size_t days = 0;
  };
  std::map<std::string, EventSums> per_event;
  for (const DayScores& d : days) {
    o1 += d.rouge1.overlap;
    c1 += d.rouge1.candidate_count;
    r1 += d.rouge1.reference_count;
    o2 += d.rouge2.overlap;
    c2 += d.rouge2.candidate_count;
    r2 += d.rouge2.reference_count;
    cos_sum += d.cos_embed;
    EventSums& e = per_event[d.event_id];
    e.rouge1 += d.rouge1.f1;
    e.rouge2 += d.rouge2.f1;
    e.cos += d.cos_embed;
    ++e.days;
  }
  out.rouge1_f.micro = rouge_from_counts(o1, c1, r1).f1;
  out.rouge2_f.micro = rouge_from_counts(o2, c2, r2).f1;
  out.cos_embed.micro = cos_sum / static_cast<double>(days.size());

  out.events = per_event.size();
  for (const auto& [_, e] : per_event) {
    const auto n = static_cast<double>(e.days);
    out.rouge1_f.macro += e.rouge1 / n;
    out.rouge2_f.macro += e.rouge2 / n;
    out.cos_embed.macro += e.cos / n;
  }
  const auto events = static_cast<double>(per_event.size());
  out.rouge1_f.macro /= events;
  out.rouge2_f.macro /= events;
  out.cos_embed.macro /= events;
  return out;
}

std::vector<std::size_t> random_summary(const DayPool& pool,
                                        std::uint64_t seed) {
  std::vector<std::size_t> order(pool.texts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span<std::size_t>(order), rng);
  std::vector<std::size_t> kept;
  std::size_t words = 0;
  for (std::size_t index : order) {
    const std::size_t w = word_count(pool.texts[index]);
    if (words + w > pool.word_budget) break;
    words += w;
    kept.push_back(index);
  }
  return kept;
}

BaselineReport random_baseline(std::span<const DayPool> pools,
                               const SifModel* sif, std::size_t runs,
                               std::uint64_t seed) {
  BaselineReport report;
  report.runs = runs;
  if (runs == 0 || pools.empty()) return report;

  report.day_means.resize(pools.size());
  for (std::size_t p = 0; p < pools.size(); ++p) {
    report.day_means[p].event_id = pools[p].event_id;
    report.day_means[p].day = pools[p].day;
  }
  std::vector<DayScores> run_scores(pools.size());
  for (std::size_t r = 0; r < runs; ++r) {
    const std::uint64_t run_seed = mix_seed(seed, r);
    for (std::size_t p = 0; p < pools.size(); ++p) {
      const DayPool& pool = pools[p];
      std::vector<std::string> picked;
      for (std::size_t index :
           random_summary(pool, mix_seed(run_seed, p))) {
        picked.push_back(pool.texts[index]);
      }
      run_scores[p] =
          score_day(pool.event_id, pool.day, join(picked, " "), pool.reference,
                    sif);
      DayScores& mean = report.day_means[p];
      mean.rouge1.precision += run_scores[p].rouge1.precision;
      mean.rouge1.recall += run_scores[p].rouge1.recall;
      mean.rouge1.f1 += run_scores[p].rouge1.f1;
      mean.rouge2.precision += run_scores[p].rouge2.precision;
      mean.rouge2.recall += run_scores[p].rouge2.recall;
      mean.rouge2.f1 += run_scores[p].rouge2.f1;
      mean.cos_embed += run_scores[p].cos_embed;
    }
    const Aggregates agg = aggregate(run_scores);
    report.mean.rouge1_f.micro += agg.rouge1_f.micro;
    report.mean.rouge1_f.macro += agg.rouge1_f.macro;
    report.mean.rouge2_f.micro += agg.rouge2_f.micro;
    report.mean.rouge2_f.macro += agg.rouge2_f.macro;
    report.mean.cos_embed.micro += agg.cos_embed.micro;
    report.mean.cos_embed.macro += agg.cos_embed.macro;
    report.mean.days = agg.days;
    report.mean.events = agg.events;
  }
  const auto n = static_cast<double>(runs);
  for (MetricAggregate* m : {&report.mean.rouge1_f, &report.mean.rouge2_f,
                             &report.mean.cos_embed}) {
    m->micro /= n;
    m->macro /= n;
  }
  for (DayScores& d : report.day_means) {
    d.rouge1.precision /= n;
    d.rouge1.recall /= n;
    d.rouge1.f1 /= n;
    d.rouge2.precision /= n;
    d.rouge2.recall /= n;
    d.rouge2.f1 /= n;
    d.cos_embed /= n;
  }
  return report;
}

}  // namespace tweetsum
