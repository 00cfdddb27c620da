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

#include "tweetsum/select.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "tweetsum/error.hpp"
#include "tweetsum/text.hpp"

namespace tweetsum {

using nlohmann::json;

bool same_entry(const SummaryEntry& a, const SummaryEntry& b) {
  return a.tweet_id == b.tweet_id && a.text == b.text &&
         a.salience == b.salience && a.day_index == b.day_index &&
         a.words == b.words;
}

void IncrementalSummary::append(SummaryEntry entry) {
  if (!entries_.empty() && entry.day_index < entries_.back().day_index) {
    throw UsageError("summary entries must be appended in day order");
  }
  word_length_ += entry.words;
  entries_.push_back(std::move(entry));
}

CapSpec CapSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw UsageError("cap must look like tweets:N, words:N or words:gold");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string_view value = text.substr(colon + 1);
  auto parse_count = [&](std::string_view v) {
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw UsageError("bad cap value \"" + std::string(v) + "\"");
    }
    return n;
  };
  CapSpec cap;
  if (kind == "tweets") {
    cap.mode = CapMode::kTweets;
    cap.tweets = parse_count(value);
  } else if (kind == "words") {
    cap.mode = CapMode::kWords;
    if (value != "gold") cap.words = parse_count(value);
  } else {
    throw UsageError("unknown cap kind \"" + std::string(kind) + "\"");
  }
  return cap;
}

std::string CapSpec::to_string() const {
  if (mode == CapMode::kTweets) return "tweets:" + std::to_string(tweets);
  return words ? "words:" + std::to_string(*words) : "words:gold";
}

double adaptive_lambda(std::size_t summary_words, double base) {
  if (summary_words < kAdaptiveKnee) return base;
  return base * std::log(static_cast<double>(kAdaptiveKnee)) /
         std::log(static_cast<double>(summary_words));
}

double similarity(std::span<const double> candidate,
                  std::span<const double> member) {
  return cosine(candidate, member);
}

std::vector<SummaryEntry> step_increment(IncrementalSummary& summary,
                                         std::span<const Candidate> batch,
                                         std::size_t day_index,
                                         const SelectionConfig& config,
                                         std::size_t day_word_budget) {
  std::vector<const Candidate*> salient;
  for (const Candidate& c : batch) {
    if (c.salience > config.lambda_salience) salient.push_back(&c);
  }
  std::stable_sort(salient.begin(), salient.end(),
                   [](const Candidate* a, const Candidate* b) {
                     if (a->salience != b->salience) {
                       return a->salience > b->salience;
                     }
                     return a->tweet->id < b->tweet->id;
                   });

  std::vector<SummaryEntry> appended;
  std::size_t day_words = 0;
  for (const Candidate* c : salient) {
    if (config.cap.mode == CapMode::kTweets &&
        appended.size() >= config.cap.tweets) {
      break;
    }
    const std::size_t words = word_count(c->tweet->text);
    if (config.cap.mode == CapMode::kWords &&
        day_words + words > day_word_budget) {
      break;
    }
    const double threshold =
        adaptive_lambda(summary.word_length(), config.lambda_sim_base);
    const bool novel = std::all_of(
        summary.entries().begin(), summary.entries().end(),
        [&](const SummaryEntry& member) {
          return similarity(c->embedding, member.embedding) < threshold;
        });
    if (!novel) continue;
    SummaryEntry entry{c->tweet->id, c->tweet->text, c->salience, day_index,
                       words, c->embedding};
    summary.append(entry);
    appended.push_back(std::move(entry));
    day_words += words;
  }
  return appended;
}

EventSummarizer::EventSummarizer(std::string event_id, const SalienceNet& net,
                                 const Vocab& vocab,
                                 const EmbeddingProvider& provider,
                                 SelectionConfig config,
                                 const GoldStandard* gold)
    : event_id_(std::move(event_id)),
      net_(net),
      vocab_(vocab),
      provider_(provider),
      config_(std::move(config)),
      gold_(gold),
      tracker_(event_id_, vocab) {
  if (config_.cap.mode == CapMode::kWords && !config_.cap.words && !gold_) {
    throw UsageError("words:gold cap requires a gold standard");
  }
  if (net_.shape().freq_dim != vocab.frequency_dim() ||
      net_.shape().emb_dim != provider.dimension()) {
    throw DataError("network shape does not match vocabulary or embeddings");
  }
}

std::size_t EventSummarizer::day_budget(std::size_t day_index) const {
  if (config_.cap.mode != CapMode::kWords) return 0;
  if (config_.cap.words) return *config_.cap.words;
  const std::string* reference = gold_->find(event_id_, day_index);
  return reference ? word_count(*reference) : 0;
}

std::vector<SummaryEntry> EventSummarizer::process_day(const DayBatch& day) {
  std::vector<Candidate> candidates;
  candidates.reserve(day.tweets.size());
  for (const Tweet& tweet : day.tweets) {
    const TokenSeq seq = encode(tweet, vocab_);
    EmbeddingVec emb = provider_.embed(tweet, seq);
    const double score = forward(net_, tracker_.snapshot(), emb);
    tracker_.update(seq);
    candidates.push_back(
        Candidate{&tweet, std::clamp(score, 0.0, 1.0), std::move(emb)});
  }
  return step_increment(summary_, candidates, day.increment.day_index,
                        config_, day_budget(day.increment.day_index));
}

void EventSummarizer::save_state(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  tracker_.save(dir / "tracker.fqt");
  std::ofstream out(dir / "summary.jsonl", std::ios::binary);
  if (!out) throw DataError("cannot write " + (dir / "summary.jsonl").string());
  write_summary_entries(out, event_id_, summary_.entries());
}

void EventSummarizer::restore_state(const std::filesystem::path& dir) {
  tracker_.restore(dir / "tracker.fqt");
  const SummaryFile file = read_summary(dir / "summary.jsonl");
  IncrementalSummary restored;
  for (const SummaryRecord& r : file.records) {
    if (r.event_id != event_id_) {
      throw DataError("saved summary belongs to event " + r.event_id);
    }
    const Tweet tweet{r.tweet_id, r.event_id, 0, r.text};
    restored.append(SummaryEntry{r.tweet_id, r.text, r.salience, r.day,
                                 word_count(r.text),
                                 provider_.embed(tweet, encode(tweet, vocab_))});
  }
  summary_ = std::move(restored);
}

EventSummary summarize_event(std::span<const DayBatch> days,
                             const SalienceNet& net, const Vocab& vocab,
                             const EmbeddingProvider& provider,
                             const SelectionConfig& config,
                             const GoldStandard* gold) {
  EventSummary out;
  if (days.empty()) return out;
  EventSummarizer summarizer(days.front().increment.event_id, net, vocab,
                             provider, config, gold);
  for (const DayBatch& day : days) {
    out.deltas.push_back(summarizer.process_day(day));
  }
  out.summary = summarizer.summary();
  return out;
}

void write_summary_header(std::ostream& out, const json& manifest) {
  out << json{{"manifest", manifest}}.dump() << '\n';
}

void write_summary_entries(std::ostream& out, const std::string& event_id,
                           std::span<const SummaryEntry> entries) {
  for (const SummaryEntry& e : entries) {
    json line = {{"event", event_id},
                 {"day", e.day_index},
                 {"id", e.tweet_id},
                 {"salience", e.salience},
                 {"text", e.text}};
    out << line.dump() << '\n';
  }
}

SummaryFile read_summary(std::istream& in) {
  SummaryFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("manifest")) {
      file.manifest = j["manifest"];
      continue;
    }
    try {
      file.records.push_back(SummaryRecord{
          j.at("event").get<std::string>(), j.at("day").get<std::size_t>(),
          j.at("id").get<std::uint64_t>(), j.at("salience").get<double>(),
          j.at("text").get<std::string>()});
    } catch (const json::exception&) {
      throw DataError("summary line " + std::to_string(line_no) +
                      " is malformed");
    }
  }
  return file;
}

SummaryFile read_summary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open summary " + path.string());
  return read_summary(in);
}

}  // namespace tweetsum
