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
#include <limits>
#include <numeric>

#include "tweetsum/error.hpp"
#include "tweetsum/rng.hpp"
#include "tweetsum/salience.hpp"

namespace tweetsum {

double mean_squared_error(const SalienceNet& net,
                          std::span<const TrainingExample* const> examples) {
  if (examples.empty()) return 0.0;
  double sum = 0.0;
  for (const TrainingExample* ex : examples) {
    sum += loss(forward(net, ex->freq, ex->emb), ex->target);
  }
  return sum / static_cast<double>(examples.size());
}

TrainResult train(std::span<const TrainingExample> dataset,
                  SalienceNet initial, const TrainConfig& config) {
  if (dataset.empty()) throw DataError("train: empty dataset");
  TrainResult result{std::move(initial), AdamState{}, {}, 0, 0.0, 0, 0, 0.0, {}};
  result.adam = AdamState(result.net.params().size());

  Rng rng(config.seed);
  std::vector<const TrainingExample*> order;
  order.reserve(dataset.size());
  for (const auto& ex : dataset) order.push_back(&ex);
  shuffle(std::span<const TrainingExample*>(order), rng);

  auto n_val = static_cast<std::size_t>(
      std::floor(config.validation_fraction * static_cast<double>(order.size())));
  if (n_val >= order.size()) n_val = 0;
  const std::vector<const TrainingExample*> validation(order.begin(),
                                                       order.begin() + n_val);
  std::vector<const TrainingExample*> training(order.begin() + n_val,
                                               order.end());
  result.train_size = training.size();
  result.validation_size = validation.size();

  std::size_t batch_size = std::max<std::size_t>(config.batch_size, 1);
  if (training.size() < batch_size) {
    result.warnings.push_back(
        "training set of " + std::to_string(training.size()) +
        " examples is smaller than one batch of " +
        std::to_string(batch_size) + "; using a single batch");
    batch_size = training.size();
  }
  if (validation.empty()) {
    result.warnings.push_back(
        "no validation examples; selecting on training loss");
  }
  double mean_target = 0.0;
  for (const auto* ex : training) mean_target += ex->target;
  mean_target /= static_cast<double>(training.size());
  const auto& held = validation.empty() ? training : validation;
  for (const auto* ex : held) {
    result.constant_validation_loss += loss(mean_target, ex->target);
  }
  result.constant_validation_loss /= static_cast<double>(held.size());
  if (config.epochs == 0) return result;

  SalienceNet net = result.net;
  AdamState adam = result.adam;
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(std::span<const TrainingExample*>(training), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < training.size(); start += batch_size) {
      const std::size_t end = std::min(start + batch_size, training.size());
      const std::span<const TrainingExample* const> batch(
          training.data() + start, end - start);
      ++step;
      const GradResult g =
          grad(net, batch, config.dropout, mix_seed(config.seed, step));
      adam_step(net, g.grads, adam, config.schedule(step));
      loss_sum += g.loss * static_cast<double>(batch.size());
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(training.size());
    entry.validation_loss = mean_squared_error(
        net, validation.empty() ? std::span<const TrainingExample* const>(training)
                                : std::span<const TrainingExample* const>(validation));
    result.log.push_back(entry);
    if (entry.validation_loss < best) {
      best = entry.validation_loss;
      result.net = net;
      result.adam = adam;
      result.best_epoch = epoch;
      result.best_validation_loss = best;
    }
  }
  return result;
}

std::vector<std::vector<std::size_t>> pack_folds(
    std::span<const std::size_t> sizes, std::size_t folds) {
  if (folds == 0) throw UsageError("pack_folds: need at least one fold");
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sizes[a] > sizes[b];
  });
  std::vector<std::vector<std::size_t>> packed(folds);
  std::vector<std::size_t> load(folds, 0);
  for (std::size_t event : order) {
    const auto lightest = static_cast<std::size_t>(
        std::min_element(load.begin(), load.end()) - load.begin());
    packed[lightest].push_back(event);
    load[lightest] += sizes[event];
  }
  return packed;
}

CrossValidation cross_validate(std::span<const EventExamples> events,
                               NetShape shape, const TrainConfig& config,
                               std::size_t folds) {
  if (events.size() < folds) {
    throw DataError("cross_validate: " + std::to_string(events.size()) +
                    " events cannot fill " + std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> sizes;
  for (const auto& e : events) sizes.push_back(e.tweet_count);
  const auto packed = pack_folds(sizes, folds);

  CrossValidation cv;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<bool> held(events.size(), false);
    for (std::size_t e : packed[f]) held[e] = true;

    std::vector<TrainingExample> train_set;
    for (std::size_t e = 0; e < events.size(); ++e) {
      if (held[e]) continue;
      train_set.insert(train_set.end(), events[e].examples.begin(),
                       events[e].examples.end());
    }
    TrainConfig fold_config = config;
    fold_config.seed = mix_seed(config.seed, f);
    FoldModel model;
    model.training = train(train_set,
                           SalienceNet::glorot(shape, mix_seed(config.seed, 1000 + f)),
                           fold_config);
    for (std::size_t e = 0; e < events.size(); ++e) {
      if (!held[e]) continue;
      model.held_out.push_back(events[e].event_id);
      auto& preds = cv.predictions[events[e].event_id];
      for (const auto& ex : events[e].examples) {
        preds.push_back(forward(model.training.net, ex.freq, ex.emb));
      }
    }
    cv.folds.push_back(std::move(model));
  }
  return cv;
}

}  // namespace tweetsum
