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

// Reference computations the library is checked against. Each one is a
// deliberately naive restatement of the definition, sharing no code path
// with the implementation beyond the public entry points it calls.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tweetsum/eval.hpp"
#include "tweetsum/ingest.hpp"
#include "tweetsum/oracle.hpp"
#include "tweetsum/rng.hpp"
#include "tweetsum/salience.hpp"

namespace tweetsum::testing {

/// Two-sided p of the signed-rank statistic by enumerating all 2^n sign
/// patterns: share of patterns whose W+ is at least as far from n(n+1)/4
/// as the observed one. Zero differences are dropped first.
double wilcoxon_enumerated_p(std::span<const double> differences);

/// Greedy oracle recomputed from scratch at every step: each candidate's
/// metric is evaluated on the full concatenation text.
OracleResult brute_force_oracle(std::span<const Tweet> tweets,
                                const std::string& gold, OracleMetric metric,
                                std::size_t word_budget, const SifModel* sif);

/// Score by explicit dense matrix products over the flat parameters.
double dense_forward(const SalienceNet& net, std::span<const double> freq,
                     std::span<const double> emb);

/// Smallest |pre-activation| over both hidden layers for one input.
double relu_margin(const SalienceNet& net, std::span<const double> freq,
                   std::span<const double> emb);

/// Central differences of the mean squared error over `batch` (no dropout).
std::vector<double> finite_difference_grad(const SalienceNet& net,
                                           std::span<const TrainingExample> batch,
                                           double h = 1e-5);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor)
double max_relative_error(std::span<const double> a, std::span<const double> b,
                          double floor = 1e-6);

/// Small net with every parameter uniform in [-1, 1].
SalienceNet random_small_net(const NetShape& shape, Rng& rng);

/// Example with a normalized sparse frequency vector and a random embedding.
TrainingExample random_example(const NetShape& shape, Rng& rng);

struct OracleInstance {
  std::vector<Tweet> tweets;
  std::string gold;
  std::size_t budget = 0;
};

/// Up to 8 tweets and a gold text of up to 12 words over a small shared
/// vocabulary, so overlaps and ties are common.
OracleInstance random_oracle_instance(Rng& rng);

/// SIF model over the vocabulary of random_oracle_instance with random
/// vectors and probabilities; the principal component is fitted on `texts`.
SifModel random_instance_sif(Rng& rng, std::span<const std::string> texts);

}  // namespace tweetsum::testing
