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
#include <ostream>
#include <string>
#include <vector>

#include "tweetsum/preprocess.hpp"

namespace tweetsum {

/// Relative token frequencies of an event stream so far. Stored sparsely:
/// `indices` ascending, every other coordinate is zero.
struct FrequencyVector {
  std::size_t dimension = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  double at(std::size_t index) const;
  std::vector<double> dense() const;
  double sum() const;

  friend bool operator==(const FrequencyVector&,
                         const FrequencyVector&) = default;
};

/// Running per-event token counts; PAD is not part of the dimensionality.
class FrequencyTracker {
 public:
  FrequencyTracker(std::string event_id, const Vocab& vocab);
  FrequencyTracker(std::string event_id, std::size_t vocab_size,
                   TokenId pad_id);

  /// Counts every non-PAD position of `seq`. Throws DataError on ids outside
  /// the vocabulary.
  void update(const TokenSeq& seq);

  FrequencyVector snapshot() const;

  const std::string& event_id() const { return event_id_; }
  std::size_t dimension() const { return counts_.size(); }
  std::uint64_t total() const { return total_; }
  std::uint64_t count(std::size_t index) const { return counts_.at(index); }

  /// FQT1 checkpoint: magic, u32 dimension, dimension x u64 counts.
  void write_checkpoint(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  /// Replaces the counts with a checkpoint of matching dimension.
  void read_checkpoint(std::istream& in);
  void restore(const std::filesystem::path& path);

 private:
  std::string event_id_;
  std::size_t vocab_size_;
  TokenId pad_id_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint32_t> touched_;
  std::uint64_t total_ = 0;
};

}  // namespace tweetsum
