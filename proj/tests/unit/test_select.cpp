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

#include <cmath>
#include <filesystem>
#include <sstream>

#include <doctest.h>

#include "synthetic.hpp"
#include "tweetsum/error.hpp"
#include "tweetsum/select.hpp"
#include "tweetsum/text.hpp"

using namespace tweetsum;

namespace {

std::vector<double> basis(std::size_t dim, std::size_t i) {
  std::vector<double> v(dim, 0.0);
  v[i] = 1.0;
  return v;
}

// Net whose output is the constant `c` for every input.
SalienceNet constant_net(const NetShape& shape, double c) {
  SalienceNet net(shape);
  net.b3() = c;
  return net;
}

const Vocab& small_vocab() {
  static const Vocab v = [] {
    std::vector<std::string> tokens{"[PAD]", "[UNK]"};
    for (int i = 0; i < 60; ++i) tokens.push_back("w" + std::to_string(i));
    for (auto t : kStreamTokens) tokens.emplace_back(t);
    return Vocab::from_tokens(tokens);
  }();
  return v;
}

}  // namespace

TEST_CASE("adaptive redundancy threshold") {
  CHECK(adaptive_lambda(10) == 0.3);
  CHECK(adaptive_lambda(50) == 0.3);
  CHECK(adaptive_lambda(2500) == 0.15);
  CHECK(adaptive_lambda(0) == 0.3);
  double previous = adaptive_lambda(1);
  for (std::size_t n = 2; n <= 100000; ++n) {
    const double current = adaptive_lambda(n);
    REQUIRE(current <= previous);
    previous = current;
  }
}

TEST_CASE("similarity") {
  const Embedder e(nullptr, 128);
  const Vocab& v = small_vocab();
  auto embed = [&](const std::string& text) {
    const Tweet t{1, "e", 0, text};
    return e.embed(t, encode(t, v));
  };
  CHECK(similarity(embed("w1 w2 w3"), embed("w1 w2 w3")) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(similarity(embed(""), embed("w1")) == 0.0);
  const auto a = embed("w1 w2 w5"), b = embed("w2 w9");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  CHECK(std::abs(similarity(a, b) - dot / std::sqrt(na * nb)) < 1e-9);
}

TEST_CASE("cap specifications") {
  CHECK(CapSpec::parse("tweets:20").tweets == 20);
  CHECK(CapSpec::parse("words:200").words == 200u);
  CHECK_FALSE(CapSpec::parse("words:gold").words.has_value());
  CHECK(CapSpec::parse("words:gold").to_string() == "words:gold");
  CHECK(CapSpec::parse("tweets:5").to_string() == "tweets:5");
  CHECK_THROWS_AS(CapSpec::parse("tweets"), UsageError);
  CHECK_THROWS_AS(CapSpec::parse("tweets:x"), UsageError);
  CHECK_THROWS_AS(CapSpec::parse("chars:5"), UsageError);
}

TEST_CASE("step increment rules") {
  std::vector<Tweet> tweets;
  for (std::uint64_t i = 0; i < 30; ++i) tweets.push_back(Tweet{i + 1, "e", 0, "a b c"});
  SelectionConfig config;

  SUBCASE("identical salient tweets collapse to one") {
    std::vector<Candidate> batch;
    for (int i = 0; i < 3; ++i) batch.push_back({&tweets[i], 0.9, basis(4, 0)});
    IncrementalSummary s;
    CHECK(step_increment(s, batch, 0, config).size() == 1);
    CHECK(s.entries()[0].tweet_id == 1);
  }
  SUBCASE("nothing above the salience threshold") {
    std::vector<Candidate> batch{{&tweets[0], 0.2, basis(4, 0)}, {&tweets[1], 0.0, basis(4, 1)}};
    IncrementalSummary s;
    CHECK(step_increment(s, batch, 0, config).empty());
    CHECK(s.size() == 0);
  }
  SUBCASE("tweet cap keeps the most salient") {
    std::vector<Candidate> batch;
    for (std::size_t i = 0; i < 30; ++i) {
      batch.push_back({&tweets[i], 0.3 + 0.02 * static_cast<double>(i), basis(30, i)});
    }
    IncrementalSummary s;
    const auto added = step_increment(s, batch, 0, config);
    REQUIRE(added.size() == 20);
    CHECK(added.front().tweet_id == 30);
    CHECK(added.back().tweet_id == 11);
  }
  SUBCASE("word cap stops at the first overflow") {
    config.cap = CapSpec::parse("words:7");
    std::vector<Candidate> batch;
    for (std::size_t i = 0; i < 5; ++i) batch.push_back({&tweets[i], 0.9 - 0.1 * i, basis(5, i)});
    IncrementalSummary s;
    const auto added = step_increment(s, batch, 0, config, 7);
    CHECK(added.size() == 2);
    CHECK(s.word_length() == 6);
  }
  SUBCASE("redundancy is checked against earlier days") {
    IncrementalSummary s;
    std::vector<Candidate> day0{{&tweets[0], 0.9, basis(3, 0)}};
    step_increment(s, day0, 0, config);
    std::vector<Candidate> day1{{&tweets[1], 0.9, basis(3, 0)}, {&tweets[2], 0.8, basis(3, 1)}};
    const auto added = step_increment(s, day1, 1, config);
    REQUIRE(added.size() == 1);
    CHECK(added[0].tweet_id == 3);
    CHECK(added[0].day_index == 1);
  }
}

TEST_CASE("summaries append in day order") {
  IncrementalSummary s;
  s.append(SummaryEntry{1, "a", 0.5, 2, 1, {}});
  CHECK_THROWS_AS(s.append(SummaryEntry{2, "b", 0.5, 1, 1, {}}), UsageError);
}

TEST_CASE("event summarization with constant nets") {
  const Vocab& v = small_vocab();
  const Embedder e(nullptr, 256);
  const NetShape shape{v.frequency_dim(), 256, 4, 4};
  std::vector<Tweet> tweets;
  for (std::uint64_t i = 0; i < 40; ++i) {
    tweets.push_back(Tweet{100 - i, "e", static_cast<std::int64_t>(i), "w" + std::to_string(i)});
  }
  const auto days = partition_increments(tweets);
  SelectionConfig config;

  SUBCASE("always salient: the 20 lowest ids") {
    const auto out = summarize_event(days, constant_net(shape, 1.0), v, e, config);
    REQUIRE(out.summary.size() == 20);
    for (std::size_t k = 0; k < 20; ++k) CHECK(out.summary.entries()[k].tweet_id == 61 + k);
  }
  SUBCASE("never salient: empty") {
    const auto out = summarize_event(days, constant_net(shape, 0.0), v, e, config);
    CHECK(out.summary.size() == 0);
    CHECK(out.deltas.size() == 1);
  }
  SUBCASE("mismatched network shape") {
    CHECK_THROWS_AS(summarize_event(days, constant_net(NetShape{3, 256, 4, 4}, 1.0), v, e, config),
                    DataError);
  }
  SUBCASE("gold-length cap needs gold") {
    config.cap = CapSpec::parse("words:gold");
    CHECK_THROWS_AS(summarize_event(days, constant_net(shape, 1.0), v, e, config), UsageError);
  }
}

TEST_CASE("resuming from saved state reproduces the one-pass summary") {
  testing::SyntheticSpec spec;
  spec.events = 1;
  spec.days = 4;
  spec.tweets_per_day = 60;
  const auto corpus = testing::make_corpus(spec);
  const Vocab vocab = corpus.vocab();
  const Embedder e(nullptr, 64);
  SalienceNet net = SalienceNet::glorot(NetShape{vocab.frequency_dim(), 64, 8, 8}, 3);
  net.b3() = 0.5;
  SelectionConfig config;
  config.lambda_salience = 0.5;
  const auto& days = corpus.events.at("event0");

  const auto one_pass = summarize_event(days, net, vocab, e, config);
  REQUIRE(one_pass.summary.size() > 3);

  const auto dir = std::filesystem::temp_directory_path() / "tweetsum_unit_replay";
  for (std::size_t split = 1; split < days.size(); ++split) {
    std::filesystem::remove_all(dir);
    {
      EventSummarizer first("event0", net, vocab, e, config);
      for (std::size_t d = 0; d < split; ++d) first.process_day(days[d]);
      first.save_state(dir);
    }
    EventSummarizer second("event0", net, vocab, e, config);
    second.restore_state(dir);
    for (std::size_t d = split; d < days.size(); ++d) second.process_day(days[d]);
    const auto& a = one_pass.summary.entries();
    const auto& b = second.summary().entries();
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(same_entry(a[k], b[k]));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary files") {
  std::stringstream buf;
  write_summary_header(buf, nlohmann::json{{"tool", "tweetsum"}});
  const std::vector<SummaryEntry> entries{{5, "hello \"world\"", 0.75, 0, 2, {}},
                                          {9, "next", 0.5, 2, 1, {}}};
  write_summary_entries(buf, "ev", entries);
  const SummaryFile f = read_summary(buf);
  CHECK(f.manifest["tool"] == "tweetsum");
  REQUIRE(f.records.size() == 2);
  CHECK(f.records[0].text == "hello \"world\"");
  CHECK(f.records[1].day == 2);
  CHECK(f.records[1].salience == 0.5);

  std::istringstream bad("{\"event\":\"e\"}\n");
  CHECK_THROWS_AS(read_summary(bad), DataError);
}
