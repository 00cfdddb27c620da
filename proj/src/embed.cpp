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

#include "tweetsum/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tweetsum/binary_io.hpp"
#include "tweetsum/error.hpp"
#include "tweetsum/kernels.hpp"
#include "tweetsum/rng.hpp"

namespace tweetsum {

namespace {
constexpr std::string_view kStoreMagic = "TEB1";
}

EmbeddingStore EmbeddingStore::read(std::istream& in) {
  binary::expect_magic(in, kStoreMagic);
  const auto dim = binary::read_le<std::uint32_t>(in, "TEB1 dimension");
  const auto count = binary::read_le<std::uint64_t>(in, "TEB1 record count");
  if (dim == 0) throw DataError("TEB1 dimension is zero");
  EmbeddingStore store(dim);
  std::vector<float> values(dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto id = binary::read_le<std::uint64_t>(
        in, "TEB1 record " + std::to_string(r) + " of " +
                std::to_string(count));
    for (auto& v : values) {
      v = binary::read_le<float>(in, "TEB1 record " + std::to_string(r) +
                                         " values (dimension " +
                                         std::to_string(dim) + ")");
      if (!std::isfinite(v)) {
        throw DataError("TEB1 record " + std::to_string(id) +
                        " has a non-finite value");
      }
    }
    store.insert(id, values);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("TEB1 file has trailing bytes after " +
                    std::to_string(count) + " records of dimension " +
                    std::to_string(dim));
  }
  return store;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embeddings " + path.string());
  return read(in);
}

void EmbeddingStore::write(std::ostream& out) const {
  std::vector<std::uint64_t> ids;
  ids.reserve(records_.size());
  for (const auto& [id, _] : records_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  binary::write_magic(out, kStoreMagic);
  binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(dimension_));
  binary::write_le<std::uint64_t>(out, ids.size());
  for (std::uint64_t id : ids) {
    binary::write_le<std::uint64_t>(out, id);
    for (float v : records_.at(id)) binary::write_le<float>(out, v);
  }
}

void EmbeddingStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write(out);
}

void EmbeddingStore::insert(std::uint64_t id, std::span<const float> values) {
  if (values.size() != dimension_) {
    throw DataError("embedding for tweet " + std::to_string(id) +
                    " has dimension " + std::to_string(values.size()) +
                    ", expected " + std::to_string(dimension_));
  }
  records_[id].assign(values.begin(), values.end());
}

const std::vector<float>* EmbeddingStore::find(std::uint64_t id) const {
  const auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

Embedder::Embedder(const EmbeddingStore* store, std::size_t dimension,
                   std::uint64_t seed)
    : store_(store), dimension_(dimension), seed_(seed) {
  if (store_ && store_->dimension() != dimension_) {
    throw DataError("embedding store dimension " +
                    std::to_string(store_->dimension()) +
                    " does not match provider dimension " +
                    std::to_string(dimension_));
  }
}

EmbeddingVec Embedder::token_vector(TokenId id) const {
  Rng rng(mix_seed(seed_, id));
  EmbeddingVec v(dimension_);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  const double norm = std::sqrt(kernels::scalar::dot(v, v));
  for (auto& x : v) x /= norm;
  return v;
}

EmbeddingVec Embedder::fallback(const TokenSeq& seq) const {
  EmbeddingVec sum(dimension_, 0.0);
  if (seq.length == 0) return sum;
  for (TokenId id : seq.tokens()) {
    const EmbeddingVec v = token_vector(id);
    kernels::scalar::axpy(1.0, v, sum);
  }
  const double scale = 1.0 / static_cast<double>(seq.length);
  for (auto& x : sum) x *= scale;
  return sum;
}

EmbeddingVec Embedder::embed(const Tweet& tweet, const TokenSeq& seq) const {
  if (store_) {
    if (const auto* stored = store_->find(tweet.id)) {
      return EmbeddingVec(stored->begin(), stored->end());
    }
  }
  return fallback(seq);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  const double aa = kernels::dot(a, a);
  const double bb = kernels::dot(b, b);
  if (aa == 0.0 || bb == 0.0) return 0.0;
  const double c = kernels::dot(a, b) / std::sqrt(aa * bb);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace tweetsum
