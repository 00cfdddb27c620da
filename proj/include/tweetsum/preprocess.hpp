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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tweetsum/ingest.hpp"

namespace tweetsum {

using TokenId = std::uint32_t;

inline constexpr std::size_t kMaxTokens = 50;
inline constexpr std::size_t kMaxCharsPerWord = 100;

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kUrlToken = "<url>";
inline constexpr std::string_view kHashtagToken = "<hashtag>";
inline constexpr std::string_view kMentionToken = "<mention>";
inline constexpr std::string_view kRetweetToken = "<rt>";

/// Stream tokens, in the order they close a vocabulary file.
inline constexpr std::array<std::string_view, 4> kStreamTokens = {
    kUrlToken, kHashtagToken, kMentionToken, kRetweetToken};

/// Subword vocabulary plus the four stream tokens. Line number in the
/// vocabulary file is the token id; the stream tokens are the last four lines.
class Vocab {
 public:
  static Vocab load(const std::filesystem::path& path);
  static Vocab from_tokens(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }

  TokenId pad_id() const { return pad_id_; }
  TokenId unk_id() const { return unk_id_; }
  TokenId url_id() const { return stream_base_; }
  TokenId hashtag_id() const { return stream_base_ + 1; }
  TokenId mention_id() const { return stream_base_ + 2; }
  TokenId retweet_id() const { return stream_base_ + 3; }

  /// Width of the frequency context: every id except PAD.
  std::size_t frequency_dim() const { return tokens_.size() - 1; }
  std::size_t frequency_index(TokenId id) const {
    return id < pad_id_ ? id : id - 1;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId pad_id_ = 0;
  TokenId unk_id_ = 0;
  TokenId stream_base_ = 0;
};

/// Lowercases, replaces URLs, @mentions, #hashtags and a leading RT marker by
/// their stream tokens, and collapses whitespace.
std::string normalize(std::string_view text);

/// Greedy longest-match-first WordPiece over already normalized text.
/// Punctuation is split off into its own words first; stream tokens map to
/// their reserved ids.
std::vector<TokenId> wordpiece_tokenize(std::string_view normalized,
                                        const Vocab& vocab);

struct TokenSeq {
  std::array<TokenId, kMaxTokens> ids{};
  std::size_t length = 0;

  std::span<const TokenId> tokens() const { return {ids.data(), length}; }

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

TokenSeq encode(std::string_view text, const Vocab& vocab);
inline TokenSeq encode(const Tweet& tweet, const Vocab& vocab) {
  return encode(tweet.text, vocab);
}

}  // namespace tweetsum
