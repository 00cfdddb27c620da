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
#include <span>
#include <unordered_map>
#include <vector>

#include "tweetsum/ingest.hpp"
#include "tweetsum/preprocess.hpp"

namespace tweetsum {

inline constexpr std::size_t kEmbeddingDim = 768;
inline constexpr std::uint64_t kFallbackSeed = 0x5eed7a11c0ffee01ULL;

using EmbeddingVec = std::vector<double>;

/// Pre-computed tweet vectors, read from the TEB1 format:
/// magic "TEB1", u32 dimension, u64 count, then count x (u64 id, dim x f32).
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dimension = kEmbeddingDim)
      : dimension_(dimension) {}

  static EmbeddingStore read(std::istream& in);
  static EmbeddingStore load(const std::filesystem::path& path);

  /// Writes records in ascending id order.
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  void insert(std::uint64_t id, std::span<const float> values);
  const std::vector<float>* find(std::uint64_t id) const;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::size_t dimension_;
  std::unordered_map<std::uint64_t, std::vector<float>> records_;
};

/// Anything that can turn a tweet into a fixed-width vector.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual EmbeddingVec embed(const Tweet& tweet, const TokenSeq& seq) const = 0;
};

/// Store lookup with a deterministic fallback for misses: the mean over the
/// tweet's non-PAD tokens of unit pseudo-random vectors keyed by token id.
class Embedder final : public EmbeddingProvider {
 public:
  explicit Embedder(const EmbeddingStore* store = nullptr,
                    std::size_t dimension = kEmbeddingDim,
                    std::uint64_t seed = kFallbackSeed);

  std::size_t dimension() const override { return dimension_; }
  EmbeddingVec embed(const Tweet& tweet, const TokenSeq& seq) const override;

  EmbeddingVec fallback(const TokenSeq& seq) const;
  EmbeddingVec token_vector(TokenId id) const;

 private:
  const EmbeddingStore* store_;
  std::size_t dimension_;
  std::uint64_t seed_;
};

/// Cosine similarity; 0 when either side is the zero vector.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace tweetsum
