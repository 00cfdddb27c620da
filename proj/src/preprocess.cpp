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

#include "tweetsum/preprocess.hpp"

#include <algorithm>
#include <fstream>

#include "tweetsum/error.hpp"
#include "tweetsum/text.hpp"

namespace tweetsum {

namespace {

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

bool is_handle_char(char c) { return is_ascii_alnum(c) || c == '_'; }

// Hashtags may carry non-ASCII letters; any UTF-8 lead/continuation byte counts.
bool is_tag_char(char c) {
  return is_handle_char(c) || static_cast<unsigned char>(c) >= 0x80;
}

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) ||
         (u >= 91 && u <= 96) || (u >= 123 && u <= 126);
}

bool is_utf8_continuation(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

std::size_t codepoint_count(std::string_view word) {
  return static_cast<std::size_t>(std::count_if(
      word.begin(), word.end(), [](char c) { return !is_utf8_continuation(c); }));
}

bool is_url(std::string_view lower) {
  return lower.starts_with("http://") || lower.starts_with("https://") ||
         lower.starts_with("t.co/");
}

// Replaces @handle and #tag occurrences inside one lowercased word, splitting
// the remainder into separate pieces.
void replace_markers(std::string_view word, std::vector<std::string>& out) {
  std::string piece;
  auto flush = [&] {
    if (!piece.empty()) out.push_back(std::move(piece));
    piece.clear();
  };
  std::size_t i = 0;
  while (i < word.size()) {
    const char c = word[i];
    const bool boundary = i == 0 || !is_ascii_alnum(word[i - 1]);
    if (boundary && (c == '@' || c == '#') && i + 1 < word.size()) {
      const bool mention = c == '@';
      std::size_t end = i + 1;
      while (end < word.size() &&
             (mention ? is_handle_char(word[end]) : is_tag_char(word[end]))) {
        ++end;
      }
      if (end > i + 1) {
        flush();
        out.emplace_back(mention ? kMentionToken : kHashtagToken);
        i = end;
        continue;
      }
    }
    piece.push_back(c);
    ++i;
  }
  flush();
}

// Splits a word on ASCII punctuation, keeping each punctuation mark.
void split_punctuation(std::string_view word,
                       std::vector<std::string_view>& out) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (is_ascii_punct(word[i])) {
      if (i > start) out.push_back(word.substr(start, i - start));
      out.push_back(word.substr(i, 1));
      start = i + 1;
    }
  }
  if (start < word.size()) out.push_back(word.substr(start));
}

void wordpiece_word(std::string_view word, const Vocab& vocab,
                    std::vector<TokenId>& out) {
  if (codepoint_count(word) > kMaxCharsPerWord) {
    out.push_back(vocab.unk_id());
    return;
  }
  const std::size_t mark = out.size();
  std::string candidate;
  std::size_t start = 0;
  while (start < word.size()) {
    std::size_t end = word.size();
    std::optional<TokenId> match;
    while (end > start) {
      candidate.clear();
      if (start > 0) candidate = "##";
      candidate.append(word.substr(start, end - start));
      match = vocab.find(candidate);
      if (match) break;
      --end;
      while (end > start && is_utf8_continuation(word[end])) --end;
    }
    if (!match) {
      out.resize(mark);
      out.push_back(vocab.unk_id());
      return;
    }
    out.push_back(*match);
    start = end;
  }
}

}  // namespace

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < kStreamTokens.size() + 2) {
    throw DataError("vocabulary too small: " + std::to_string(tokens.size()));
  }
  Vocab vocab;
  vocab.stream_base_ =
      static_cast<TokenId>(tokens.size() - kStreamTokens.size());
  for (std::size_t k = 0; k < kStreamTokens.size(); ++k) {
    if (tokens[vocab.stream_base_ + k] != kStreamTokens[k]) {
      throw DataError("vocabulary must end with " + std::string(kUrlToken) +
                      " " + std::string(kHashtagToken) + " " +
                      std::string(kMentionToken) + " " +
                      std::string(kRetweetToken));
    }
  }
  vocab.index_.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!vocab.index_.emplace(tokens[i], static_cast<TokenId>(i)).second) {
      throw DataError("duplicate vocabulary token \"" + tokens[i] +
                      "\" at line " + std::to_string(i));
    }
  }
  const auto pad = vocab.index_.find(std::string(kPadToken));
  const auto unk = vocab.index_.find(std::string(kUnkToken));
  if (pad == vocab.index_.end() || unk == vocab.index_.end()) {
    throw DataError("vocabulary lacks [PAD] or [UNK]");
  }
  vocab.pad_id_ = pad->second;
  vocab.unk_id_ = unk->second;
  vocab.tokens_ = std::move(tokens);
  return vocab;
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return from_tokens(std::move(tokens));
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string normalize(std::string_view text) {
  std::vector<std::string> pieces;
  const auto words = split_whitespace(text);
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::string lower(words[w]);
    std::transform(lower.begin(), lower.end(), lower.begin(), ascii_lower);
    if (w == 0 && (lower == "rt" || lower == "rt:")) {
      pieces.emplace_back(kRetweetToken);
    } else if (is_url(lower)) {
      pieces.emplace_back(kUrlToken);
    } else {
      replace_markers(lower, pieces);
    }
  }
  return join(pieces, " ");
}

std::vector<TokenId> wordpiece_tokenize(std::string_view normalized,
                                        const Vocab& vocab) {
  std::vector<TokenId> ids;
  std::vector<std::string_view> words;
  for (std::string_view word : split_whitespace(normalized)) {
    if (std::find(kStreamTokens.begin(), kStreamTokens.end(), word) !=
        kStreamTokens.end()) {
      ids.push_back(*vocab.find(word));
      continue;
    }
    words.clear();
    split_punctuation(word, words);
    for (std::string_view piece : words) wordpiece_word(piece, vocab, ids);
  }
  return ids;
}

TokenSeq encode(std::string_view text, const Vocab& vocab) {
  const std::vector<TokenId> ids = wordpiece_tokenize(normalize(text), vocab);
  TokenSeq seq;
  seq.length = std::min(ids.size(), kMaxTokens);
  std::copy_n(ids.begin(), seq.length, seq.ids.begin());
  std::fill(seq.ids.begin() + static_cast<std::ptrdiff_t>(seq.length),
            seq.ids.end(), vocab.pad_id());
  return seq;
}

}  // namespace tweetsum
