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

#include "tweetsum/context.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "tweetsum/binary_io.hpp"
#include "tweetsum/error.hpp"

namespace tweetsum {

namespace {
constexpr std::string_view kCheckpointMagic = "FQT1";
}

double FrequencyVector::at(std::size_t index) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

std::vector<double> FrequencyVector::dense() const {
  std::vector<double> out(dimension, 0.0);
  for (std::size_t k = 0; k < indices.size(); ++k) out[indices[k]] = values[k];
  return out;
}

double FrequencyVector::sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

FrequencyTracker::FrequencyTracker(std::string event_id, const Vocab& vocab)
    : FrequencyTracker(std::move(event_id), vocab.size(), vocab.pad_id()) {}

FrequencyTracker::FrequencyTracker(std::string event_id,
                                   std::size_t vocab_size, TokenId pad_id)
    : event_id_(std::move(event_id)),
      vocab_size_(vocab_size),
      pad_id_(pad_id),
      counts_(vocab_size - 1, 0) {}

void FrequencyTracker::update(const TokenSeq& seq) {
  for (TokenId id : seq.tokens()) {
    if (id >= vocab_size_) {
      throw DataError("token id " + std::to_string(id) +
                      " outside vocabulary of size " +
                      std::to_string(vocab_size_));
    }
    if (id == pad_id_) continue;
    const std::size_t index = id < pad_id_ ? id : id - 1;
    if (counts_[index]++ == 0) {
      touched_.push_back(static_cast<std::uint32_t>(index));
    }
    ++total_;
  }
}

FrequencyVector FrequencyTracker::snapshot() const {
  FrequencyVector out;
  out.dimension = counts_.size();
  if (total_ == 0) return out;
  out.indices = touched_;
  std::sort(out.indices.begin(), out.indices.end());
  out.values.reserve(out.indices.size());
  const auto total = static_cast<double>(total_);
  for (std::uint32_t index : out.indices) {
    out.values.push_back(static_cast<double>(counts_[index]) / total);
  }
  return out;
}

void FrequencyTracker::write_checkpoint(std::ostream& out) const {
  binary::write_magic(out, kCheckpointMagic);
  binary::write_le<std::uint32_t>(out,
                                  static_cast<std::uint32_t>(counts_.size()));
  for (std::uint64_t c : counts_) binary::write_le<std::uint64_t>(out, c);
}

void FrequencyTracker::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_checkpoint(out);
}

void FrequencyTracker::read_checkpoint(std::istream& in) {
  binary::expect_magic(in, kCheckpointMagic);
  const auto dim = binary::read_le<std::uint32_t>(in, "FQT1 dimension");
  if (dim != counts_.size()) {
    throw DataError("FQT1 dimension " + std::to_string(dim) +
                    " does not match tracker dimension " +
                    std::to_string(counts_.size()));
  }
  std::vector<std::uint64_t> counts(dim);
  for (auto& c : counts) c = binary::read_le<std::uint64_t>(in, "FQT1 counts");
  counts_ = std::move(counts);
  touched_.clear();
  total_ = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] > 0) touched_.push_back(static_cast<std::uint32_t>(i));
    total_ += counts_[i];
  }
}

void FrequencyTracker::restore(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  read_checkpoint(in);
}

}  // namespace tweetsum
