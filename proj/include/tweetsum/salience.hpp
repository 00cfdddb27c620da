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
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "tweetsum/context.hpp"
#include "tweetsum/embed.hpp"
#include "tweetsum/eval.hpp"
#include "tweetsum/ingest.hpp"

namespace tweetsum {

/// Layer widths of the salience regressor. The defaults are the full-size
/// network: 30,525 frequency inputs, 768-dim tweet embedding, two hidden
/// layers of 50 units.
struct NetShape {
  std::size_t freq_dim = 30525;
  std::size_t emb_dim = kEmbeddingDim;
  std::size_t freq_hidden = 50;
  std::size_t hidden = 50;

  std::size_t concat_dim() const { return emb_dim + freq_hidden; }
  std::size_t parameter_count() const {
    return freq_dim * freq_hidden + freq_hidden + concat_dim() * hidden +
           hidden + hidden + 1;
  }

  friend bool operator==(const NetShape&, const NetShape&) = default;
};

inline constexpr double kDropoutRate = 0.5;

/// Parameters of
///   h1    = relu(W1^T freq + b1)            (freq_dim -> freq_hidden)
///   h2    = relu(W2^T [emb; h1] + b2)       (concat_dim -> hidden)
///   score = W3^T h2 + b3                     (hidden -> 1)
/// stored flat in the order W1, b1, W2, b2, W3, b3; matrices are row-major
/// with one row per input unit.
class SalienceNet {
 public:
  explicit SalienceNet(NetShape shape = {});

  /// Uniform in +-sqrt(6 / (fan_in + fan_out)) per layer, zero biases.
  static SalienceNet glorot(NetShape shape, std::uint64_t seed);

  const NetShape& shape() const { return shape_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::span<double> w1() { return slice(w1_, shape_.freq_dim * shape_.freq_hidden); }
  std::span<double> b1() { return slice(b1_, shape_.freq_hidden); }
  std::span<double> w2() { return slice(w2_, shape_.concat_dim() * shape_.hidden); }
  std::span<double> b2() { return slice(b2_, shape_.hidden); }
  std::span<double> w3() { return slice(w3_, shape_.hidden); }
  double& b3() { return params_[b3_]; }

  std::span<const double> w1() const { return slice(w1_, shape_.freq_dim * shape_.freq_hidden); }
  std::span<const double> b1() const { return slice(b1_, shape_.freq_hidden); }
  std::span<const double> w2() const { return slice(w2_, shape_.concat_dim() * shape_.hidden); }
  std::span<const double> b2() const { return slice(b2_, shape_.hidden); }
  std::span<const double> w3() const { return slice(w3_, shape_.hidden); }
  double b3() const { return params_[b3_]; }

  std::span<const double> w1_row(std::size_t input) const {
    return slice(w1_ + input * shape_.freq_hidden, shape_.freq_hidden);
  }
  std::span<const double> w2_row(std::size_t input) const {
    return slice(w2_ + input * shape_.hidden, shape_.hidden);
  }

  bool all_finite() const;

 private:
  std::span<double> slice(std::size_t offset, std::size_t n) {
    return std::span<double>(params_).subspan(offset, n);
  }
  std::span<const double> slice(std::size_t offset, std::size_t n) const {
    return std::span<const double>(params_).subspan(offset, n);
  }

  NetShape shape_;
  std::vector<double> params_;
  std::size_t w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0, w3_ = 0, b3_ = 0;
};

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

struct TrainingExample {
  FrequencyVector freq;
  EmbeddingVec emb;
  double target = 0.0;
};

/// Per-example dropout seed inside a batch drawn with `batch_seed`.
std::uint64_t example_seed(std::uint64_t batch_seed, std::size_t index);

/// Network output for one tweet. In train mode inverted dropout (keep 0.5,
/// survivors scaled by 2) is applied to both hidden layers with masks drawn
/// from `seed`. Throws NumericError on a non-finite result.
double forward(const SalienceNet& net, const FrequencyVector& freq,
               std::span<const double> emb, bool train_mode = false,
               std::uint64_t seed = 0);

/// Squared error.
double loss(double score, double target);

struct GradResult {
  SalienceNet grads;  // same layout as the network
  double loss = 0.0;  // mean over the batch
};

/// Gradients of the mean squared error over `batch`. Example k uses dropout
/// masks drawn from example_seed(seed, k), i.e. exactly the masks forward()
/// would draw with that seed.
GradResult grad(const SalienceNet& net,
                std::span<const TrainingExample* const> batch, bool train_mode,
                std::uint64_t seed);
GradResult grad(const SalienceNet& net, std::span<const TrainingExample> batch,
                bool train_mode, std::uint64_t seed);

/// One bias-corrected Adam step over flat buffers; increments state.t.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double lr);
void adam_step(SalienceNet& net, const SalienceNet& grads, AdamState& state,
               double lr);

/// d_model^-0.5 * min(step^-0.5, step * warmup^-1.5). Throws UsageError for
/// step 0.
double noam_lr(std::uint64_t step, double d_model, double warmup);

struct NoamSchedule {
  double d_model = 818.0;
  double warmup = 4000.0;
  double scale = 1.0;

  double operator()(std::uint64_t step) const {
    return scale * noam_lr(step, d_model, warmup);
  }
};

// ---------------------------------------------------------------------------
// Targets

/// Salience target of one tweet: 1 for oracle tweets, 0 on days without a
/// gold text, otherwise max(0, SIF cosine to the gold text).
double salience_target(std::string_view tweet_text, const std::string* gold,
                       bool in_oracle, const SifModel& sif);

struct TargetRecord {
  std::string event_id;
  std::size_t day = 0;
  std::uint64_t tweet_id = 0;
  double target = 0.0;
  bool oracle = false;
};

/// Targets for every tweet of one event's days, in stream order.
std::vector<TargetRecord> build_targets(
    std::span<const DayBatch> days, const GoldStandard& gold,
    const std::unordered_set<std::uint64_t>& oracle_ids, const SifModel& sif);

/// Pairs each tweet with its causal frequency snapshot (all earlier tweets of
/// the event, excluding itself) and its embedding. `targets` maps tweet id to
/// target; tweets without a target are skipped.
std::vector<TrainingExample> assemble_examples(
    std::span<const DayBatch> days,
    const std::map<std::uint64_t, double>& targets, const Vocab& vocab,
    const EmbeddingProvider& provider);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 128;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  NoamSchedule schedule;
  bool dropout = true;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainResult {
  SalienceNet net;
  AdamState adam;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  double best_validation_loss = 0.0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  /// MSE on the validation set (training set when empty) of always
  /// predicting the mean training target.
  double constant_validation_loss = 0.0;
  std::vector<std::string> warnings;
};

/// Mean squared error of eval-mode predictions.
double mean_squared_error(const SalienceNet& net,
                          std::span<const TrainingExample* const> examples);

/// Seeded 90/10 split, shuffled minibatches, Adam with the Noam schedule.
/// Returns the epoch checkpoint with the lowest validation MSE.
TrainResult train(std::span<const TrainingExample> dataset,
                  SalienceNet initial, const TrainConfig& config);

struct EventExamples {
  std::string event_id;
  std::vector<TrainingExample> examples;
  std::size_t tweet_count = 0;
};

/// Largest-first packing of event sizes into the currently lightest fold
/// (lowest index on ties). Returns event indices per fold.
std::vector<std::vector<std::size_t>> pack_folds(
    std::span<const std::size_t> sizes, std::size_t folds);

struct FoldModel {
  std::vector<std::string> held_out;
  TrainResult training;
};

struct CrossValidation {
  std::vector<FoldModel> folds;
  /// Eval-mode predictions for each event, from the fold that held it out.
  std::map<std::string, std::vector<double>> predictions;
};

CrossValidation cross_validate(std::span<const EventExamples> events,
                               NetShape shape, const TrainConfig& config,
                               std::size_t folds = 3);

// ---------------------------------------------------------------------------
// Checkpoints: magic "TSN1", (rows, cols) u32 pairs for W1, W2, W3, then
// row-major f32 W1, b1, W2, b2, W3, b3, then a presence byte for an optional
// Adam section (u64 t, then f64 m and v in parameter order).

void write_checkpoint(std::ostream& out, const SalienceNet& net,
                      const AdamState* adam = nullptr);
void save_checkpoint(const std::filesystem::path& path, const SalienceNet& net,
                     const AdamState* adam = nullptr);

struct Checkpoint {
  SalienceNet net;
  std::optional<AdamState> adam;
};

Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tweetsum
