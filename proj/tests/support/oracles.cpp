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

#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "tweetsum/text.hpp"

namespace tweetsum::testing {

double wilcoxon_enumerated_p(std::span<const double> differences) {
  std::vector<double> d;
  for (double x : differences) {
    if (x != 0.0) d.push_back(x);
  }
  const std::size_t n = d.size();
  // Average ranks of |d| by direct counting.
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t below = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) ++below;
      if (std::abs(d[j]) == std::abs(d[i])) ++equal;
    }
    rank[i] = static_cast<double>(below) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  double observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0) observed += rank[i];
  }
  const double mu = static_cast<double>(n * (n + 1)) / 4.0;
  const double extreme = std::abs(observed - mu);
  std::uint64_t hits = 0;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) w += rank[i];
    }
    if (std::abs(w - mu) >= extreme - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(patterns);
}

OracleResult brute_force_oracle(std::span<const Tweet> tweets,
                                const std::string& gold, OracleMetric metric,
                                std::size_t word_budget, const SifModel* sif) {
  OracleResult out;
  if (trim(gold).empty()) return out;
  std::vector<std::string> chosen;
  std::vector<bool> used(tweets.size(), false);
  std::size_t words = 0;
  double current = 0.0;
  for (;;) {
    // Candidates visited in ascending id so the first maximum wins ties.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < tweets.size(); ++i) order.push_back(i);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return tweets[a].id < tweets[b].id; });
    std::size_t best = tweets.size();
    double best_value = -1.0;
    for (std::size_t i : order) {
      if (used[i] || words + word_count(tweets[i].text) > word_budget) continue;
      std::vector<std::string> trial = chosen;
      trial.push_back(tweets[i].text);
      const std::string text = join(trial, " ");
      const double value = metric == OracleMetric::kRouge2F
                               ? rouge_n(text, gold, 2).f1
                               : sif->cos_embed(text, gold);
      if (value > best_value) {
        best = i;
        best_value = value;
      }
    }
    if (best == tweets.size() || !(best_value > current)) break;
    used[best] = true;
    words += word_count(tweets[best].text);
    chosen.push_back(tweets[best].text);
    current = best_value;
    out.ids.push_back(tweets[best].id);
    out.trace.push_back(best_value);
  }
  return out;
}

namespace {

struct Activations {
  std::vector<double> pre1, pre2;
  double score = 0.0;
};

Activations dense_pass(const SalienceNet& net, std::span<const double> freq,
                       std::span<const double> emb) {
  const NetShape& s = net.shape();
  const auto p = net.params();
  const std::size_t w1 = 0;
  const std::size_t b1 = w1 + s.freq_dim * s.freq_hidden;
  const std::size_t w2 = b1 + s.freq_hidden;
  const std::size_t b2 = w2 + s.concat_dim() * s.hidden;
  const std::size_t w3 = b2 + s.hidden;
  const std::size_t b3 = w3 + s.hidden;
  Activations a;
  std::vector<double> h1(s.freq_hidden);
  for (std::size_t j = 0; j < s.freq_hidden; ++j) {
    double z = p[b1 + j];
    for (std::size_t i = 0; i < s.freq_dim; ++i) z += freq[i] * p[w1 + i * s.freq_hidden + j];
    a.pre1.push_back(z);
    h1[j] = std::max(z, 0.0);
  }
  std::vector<double> concat(emb.begin(), emb.end());
  concat.insert(concat.end(), h1.begin(), h1.end());
  a.score = p[b3];
  for (std::size_t j = 0; j < s.hidden; ++j) {
    double z = p[b2 + j];
    for (std::size_t i = 0; i < s.concat_dim(); ++i) z += concat[i] * p[w2 + i * s.hidden + j];
    a.pre2.push_back(z);
    a.score += std::max(z, 0.0) * p[w3 + j];
  }
  return a;
}

double batch_loss(const SalienceNet& net, std::span<const TrainingExample> batch) {
  double sum = 0.0;
  for (const auto& ex : batch) {
    const double r = dense_pass(net, ex.freq.dense(), ex.emb).score - ex.target;
    sum += r * r;
  }
  return sum / static_cast<double>(batch.size());
}

}  // namespace

double dense_forward(const SalienceNet& net, std::span<const double> freq,
                     std::span<const double> emb) {
  return dense_pass(net, freq, emb).score;
}

double relu_margin(const SalienceNet& net, std::span<const double> freq,
                   std::span<const double> emb) {
  const Activations a = dense_pass(net, freq, emb);
  double m = INFINITY;
  for (double z : a.pre1) m = std::min(m, std::abs(z));
  for (double z : a.pre2) m = std::min(m, std::abs(z));
  return m;
}

std::vector<double> finite_difference_grad(const SalienceNet& net,
                                           std::span<const TrainingExample> batch,
                                           double h) {
  SalienceNet probe = net;
  auto p = probe.params();
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double up = batch_loss(probe, batch);
    p[i] = saved - h;
    const double down = batch_loss(probe, batch);
    p[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

SalienceNet random_small_net(const NetShape& shape, Rng& rng) {
  SalienceNet net(shape);
  for (double& x : net.params()) x = rng.uniform(-1.0, 1.0);
  return net;
}

TrainingExample random_example(const NetShape& shape, Rng& rng) {
  TrainingExample ex;
  ex.freq.dimension = shape.freq_dim;
  double total = 0.0;
  std::vector<double> counts(shape.freq_dim, 0.0);
  for (std::size_t i = 0; i < shape.freq_dim; ++i) {
    if (rng.uniform() < 0.6) counts[i] = static_cast<double>(1 + rng.below(5));
    total += counts[i];
  }
  for (std::size_t i = 0; i < shape.freq_dim; ++i) {
    if (counts[i] > 0) {
      ex.freq.indices.push_back(static_cast<std::uint32_t>(i));
      ex.freq.values.push_back(counts[i] / total);
    }
  }
  for (std::size_t i = 0; i < shape.emb_dim; ++i) ex.emb.push_back(rng.uniform(-1.0, 1.0));
  ex.target = rng.uniform();
  return ex;
}

namespace {

const std::vector<std::string>& instance_words() {
  static const std::vector<std::string> words{
      "storm", "flood", "river", "city", "rescue", "team", "the", "a",
      "of", "in", "water", "rising", "people", "help", "now", "RT"};
  return words;
}

}  // namespace

OracleInstance random_oracle_instance(Rng& rng) {
  const auto& words = instance_words();
  auto text = [&](std::size_t max_words, bool allow_rt) {
    std::vector<std::string> w(1 + rng.below(max_words));
    for (auto& x : w) {
      do {
        x = words[rng.below(words.size())];
      } while (!allow_rt && x == "RT");
    }
    return join(w, " ");
  };
  OracleInstance inst;
  inst.gold = text(12, false);
  const std::size_t n = 1 + rng.below(8);
  for (std::size_t i = 0; i < n; ++i) {
    // Ids are shuffled relative to stream position to exercise tie-breaks.
    inst.tweets.push_back(Tweet{100 + rng.below(1000) * 8 + i, "e",
                                static_cast<std::int64_t>(i), text(6, true)});
  }
  // Duplicate a tweet now and then so equal metric values occur.
  if (n > 1 && rng.uniform() < 0.3) inst.tweets[n - 1].text = inst.tweets[0].text;
  inst.budget = word_count(inst.gold) + rng.below(6);
  return inst;
}

SifModel random_instance_sif(Rng& rng, std::span<const std::string> texts) {
  WordVectors vectors(6);
  WordProbs probs;
  for (const auto& w : instance_words()) {
    std::vector<double> v(6);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    std::string lower = w;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    vectors.insert(lower, v);
    probs.set(lower, rng.uniform(1e-4, 1e-2));
  }
  SifModel sif(std::move(vectors), std::move(probs));
  sif.fit_principal_component(texts);
  return sif;
}

}  // namespace tweetsum::testing
