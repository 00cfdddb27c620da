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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tweetsum/context.hpp"
#include "tweetsum/embed.hpp"
#include "tweetsum/error.hpp"
#include "tweetsum/eval.hpp"
#include "tweetsum/ingest.hpp"
#include "tweetsum/oracle.hpp"
#include "tweetsum/preprocess.hpp"
#include "tweetsum/rng.hpp"
#include "tweetsum/salience.hpp"
#include "tweetsum/select.hpp"
#include "tweetsum/text.hpp"

namespace tweetsum::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";

struct Session {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> args;
  std::string command;
  std::string effective_config;
  std::size_t jobs = 1;

  json manifest() const {
    return json{{"tool", "tweetsum"},
                {"version", kVersion},
                {"command", command},
                {"argv", args},
                {"config", effective_config}};
  }

  void warn(const std::string& message) const {
    err << "warning: " << message << '\n';
  }
};

// Runs fn(0..n-1) on up to `jobs` threads; results keep index order.
template <typename Fn>
auto parallel_map(std::size_t n, std::size_t jobs, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<std::optional<Result>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<Result> results;
  results.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    results.push_back(std::move(*slots[i]));
  }
  return results;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

struct Corpus {
  std::map<std::string, std::vector<DayBatch>> events;
  std::size_t tweets = 0;
  std::size_t skipped = 0;

  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    for (const auto& [_, days] : events) {
      for (const auto& day : days) {
        for (const auto& t : day.tweets) out.push_back(t.text);
      }
    }
    return out;
  }
};

Corpus load_corpus(const fs::path& path, const Session& session) {
  StreamReadResult read = read_stream(path);
  for (const auto& w : read.warnings) session.warn(path.string() + ": " + w);
  Corpus corpus;
  corpus.tweets = read.tweets.size();
  corpus.skipped = read.skipped;
  for (auto& [event, tweets] : group_by_event(read.tweets)) {
    corpus.events.emplace(event, partition_increments(tweets));
  }
  return corpus;
}

GoldStandard load_gold(const fs::path& path, const Session& session) {
  GoldReadResult read = read_gold(path);
  for (const auto& w : read.warnings) session.warn(path.string() + ": " + w);
  return std::move(read.gold);
}

struct SifOptions {
  std::string word_vectors;
  std::string word_probs;
  bool keep_pc = false;

  void add_to(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--word-vectors", word_vectors,
                                "Word vectors for SIF (text: 'count dim' header, "
                                "then 'word v1 .. vdim')");
    if (required) opt->required();
    opt->check(CLI::ExistingFile);
    cmd->add_option("--word-probs", word_probs,
                    "Word probabilities ('word p' per line); estimated from "
                    "the stream with add-one smoothing when absent")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--keep-pc", keep_pc,
                  "Do not remove the first principal component");
  }
};

/// The principal component is fitted on `pc_texts`.
std::unique_ptr<SifModel> load_sif(const SifOptions& opts,
                                   const std::vector<std::string>& prob_texts,
                                   const std::vector<std::string>& pc_texts) {
  WordVectors vectors = WordVectors::load(opts.word_vectors);
  WordProbs probs = opts.word_probs.empty() ? WordProbs::estimate(prob_texts)
                                            : WordProbs::load(opts.word_probs);
  auto sif = std::make_unique<SifModel>(std::move(vectors), std::move(probs),
                                        kSifWeight, !opts.keep_pc);
  if (!opts.keep_pc) sif->fit_principal_component(pc_texts);
  return sif;
}

std::vector<std::string> gold_texts(const GoldStandard& gold) {
  std::vector<std::string> out;
  for (const auto& [_, text] : gold.entries()) out.push_back(text);
  return out;
}

// Tweets plus gold texts: the text population the oracle and target SIF
// space is fitted on.
std::vector<std::string> stream_and_gold(const Corpus& corpus,
                                         const GoldStandard& gold) {
  std::vector<std::string> texts = corpus.texts();
  for (auto& g : gold_texts(gold)) texts.push_back(std::move(g));
  return texts;
}

struct ProviderOptions {
  std::string embeddings;
  std::size_t dimension = kEmbeddingDim;
  std::uint64_t seed = kFallbackSeed;
};

struct Provider {
  std::unique_ptr<EmbeddingStore> store;
  std::unique_ptr<Embedder> embedder;
};

Provider make_provider(const ProviderOptions& opts) {
  Provider p;
  std::size_t dim = opts.dimension;
  if (!opts.embeddings.empty()) {
    p.store = std::make_unique<EmbeddingStore>(EmbeddingStore::load(opts.embeddings));
    dim = p.store->dimension();
  }
  p.embedder = std::make_unique<Embedder>(p.store.get(), dim, opts.seed);
  return p;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateOptions {
  std::string stream, gold, embeddings, vocab;
};

int run_validate(const ValidateOptions& o, Session& s) {
  const Corpus corpus = load_corpus(o.stream, s);
  std::optional<GoldStandard> gold;
  if (!o.gold.empty()) gold = load_gold(o.gold, s);

  std::size_t days = 0;
  std::size_t gold_days = 0;
  std::size_t gold_words = 0;
  std::ostringstream table;
  table << std::left << std::setw(24) << "event" << std::right << std::setw(10)
        << "tweets" << std::setw(7) << "days" << std::setw(11) << "gold days"
        << std::setw(14) << "gold length" << '\n';
  for (const auto& [event, batches] : corpus.events) {
    std::size_t tweets = 0;
    std::size_t event_gold = 0;
    std::size_t event_words = 0;
    for (const auto& b : batches) {
      tweets += b.tweets.size();
      if (gold) {
        if (const auto* g = gold->find(event, b.increment.day_index)) {
          ++event_gold;
          event_words += word_count(*g);
        }
      }
    }
    days += batches.size();
    gold_days += event_gold;
    gold_words += event_words;
    table << std::left << std::setw(24) << event << std::right << std::setw(10)
          << tweets << std::setw(7) << batches.size() << std::setw(11)
          << event_gold << std::setw(14) << std::fixed << std::setprecision(1)
          << (event_gold ? static_cast<double>(event_words) / event_gold : 0.0)
          << '\n';
  }
  const auto n_events = corpus.events.size();
  s.out << "stream: " << corpus.tweets << " tweets, " << corpus.skipped
        << " skipped, " << n_events << " events, " << days << " days\n";
  s.out << "mean tweets/event: " << std::fixed << std::setprecision(1)
        << (n_events ? static_cast<double>(corpus.tweets) / n_events : 0.0)
        << '\n';
  if (gold) {
    s.out << "gold: " << gold->size() << " entries, " << gold_days
          << " of " << days << " stream days covered, mean length "
          << (gold_days ? static_cast<double>(gold_words) / gold_days : 0.0)
          << " words\n";
  }
  s.out << table.str();

  if (!o.vocab.empty()) {
    const Vocab vocab = Vocab::load(o.vocab);
    std::size_t tokens = 0;
    std::size_t unknown = 0;
    std::size_t truncated = 0;
    for (const auto& [_, batches] : corpus.events) {
      for (const auto& b : batches) {
        for (const auto& t : b.tweets) {
          const auto ids = wordpiece_tokenize(normalize(t.text), vocab);
          tokens += ids.size();
          unknown += static_cast<std::size_t>(
              std::count(ids.begin(), ids.end(), vocab.unk_id()));
          truncated += ids.size() > kMaxTokens ? 1 : 0;
        }
      }
    }
    s.out << "vocab: " << vocab.size() << " ids, frequency context "
          << vocab.frequency_dim() << ", unknown-token rate "
          << std::setprecision(4)
          << (tokens ? static_cast<double>(unknown) / tokens : 0.0) << ", "
          << truncated << " tweets truncated at " << kMaxTokens << " tokens\n";
  }
  if (!o.embeddings.empty()) {
    const EmbeddingStore store = EmbeddingStore::load(o.embeddings);
    std::size_t covered = 0;
    for (const auto& [_, batches] : corpus.events) {
      for (const auto& b : batches) {
        for (const auto& t : b.tweets) covered += store.find(t.id) ? 1 : 0;
      }
    }
    s.out << "embeddings: " << store.size() << " records of dimension "
          << store.dimension() << ", " << covered << " of " << corpus.tweets
          << " stream tweets covered\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleOptions {
  std::string stream, gold, out;
  std::string metric = "both";
  SifOptions sif;
};

int run_oracle(const OracleOptions& o, Session& s) {
  const Corpus corpus = load_corpus(o.stream, s);
  const GoldStandard gold = load_gold(o.gold, s);
  std::vector<OracleMetric> metrics;
  if (o.metric == "both" || o.metric == "rouge2_f") {
    metrics.push_back(OracleMetric::kRouge2F);
  }
  if (o.metric == "both" || o.metric == "cosine") {
    metrics.push_back(OracleMetric::kCosine);
  }
  std::unique_ptr<SifModel> sif;
  if (std::find(metrics.begin(), metrics.end(), OracleMetric::kCosine) !=
      metrics.end()) {
    if (o.sif.word_vectors.empty()) {
      throw UsageError("the cosine oracle needs --word-vectors");
    }
    sif = load_sif(o.sif, corpus.texts(), stream_and_gold(corpus, gold));
  }

  std::vector<const std::pair<const std::string, std::vector<DayBatch>>*> events;
  for (const auto& e : corpus.events) events.push_back(&e);
  auto lines = parallel_map(events.size(), s.jobs, [&](std::size_t i) {
    std::vector<std::string> out;
    const auto& [event, batches] = *events[i];
    for (OracleMetric metric : metrics) {
      for (const auto& b : batches) {
        const std::string* g = gold.find(event, b.increment.day_index);
        if (!g) continue;
        const OracleResult r =
            greedy_oracle(b.tweets, *g, metric, word_count(*g), sif.get());
        out.push_back(json{{"event", event},
                           {"day", b.increment.day_index},
                           {"metric", oracle_metric_name(metric)},
                           {"ids", r.ids}}
                          .dump());
      }
    }
    return out;
  });
  auto file = open_output(o.out);
  file << json{{"manifest", s.manifest()}}.dump() << '\n';
  std::size_t count = 0;
  for (const auto& event_lines : lines) {
    for (const auto& line : event_lines) {
      file << line << '\n';
      ++count;
    }
  }
  s.out << "wrote " << count << " oracle summaries to " << o.out << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// targets

struct TargetsOptions {
  std::string stream, gold, oracle, out;
  std::string oracle_metric = "cosine";
  SifOptions sif;
};

// (event -> oracle tweet ids) for one metric.
std::map<std::string, std::unordered_set<std::uint64_t>> read_oracle_ids(
    const fs::path& path, const std::string& metric) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open oracle file " + path.string());
  std::map<std::string, std::unordered_set<std::uint64_t>> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("manifest")) continue;
    try {
      if (j.at("metric").get<std::string>() != metric) continue;
      auto& set = ids[j.at("event").get<std::string>()];
      for (const auto& id : j.at("ids")) set.insert(id.get<std::uint64_t>());
    } catch (const json::exception&) {
      throw DataError("oracle line " + std::to_string(line_no) +
                      " is malformed");
    }
  }
  return ids;
}

int run_targets(const TargetsOptions& o, Session& s) {
  const Corpus corpus = load_corpus(o.stream, s);
  const GoldStandard gold = load_gold(o.gold, s);
  const auto oracle_ids = read_oracle_ids(o.oracle, o.oracle_metric);
  const auto sif = load_sif(o.sif, corpus.texts(), stream_and_gold(corpus, gold));

  auto file = open_output(o.out);
  file << json{{"manifest", s.manifest()}}.dump() << '\n';
  static const std::unordered_set<std::uint64_t> kNone;
  std::size_t count = 0;
  std::size_t positives = 0;
  for (const auto& [event, batches] : corpus.events) {
    const auto it = oracle_ids.find(event);
    const auto records = build_targets(
        batches, gold, it == oracle_ids.end() ? kNone : it->second, *sif);
    for (const auto& r : records) {
      file << json{{"event", r.event_id},
                   {"day", r.day},
                   {"id", r.tweet_id},
                   {"target", r.target},
                   {"oracle", r.oracle}}
                  .dump()
           << '\n';
      ++count;
      positives += r.oracle ? 1 : 0;
    }
  }
  s.out << "wrote " << count << " targets (" << positives
        << " oracle tweets) to " << o.out << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string stream, targets, vocab, out, log;
  ProviderOptions provider;
  std::size_t folds = 0;
  std::size_t epochs = 5;
  std::size_t batch = 128;
  std::uint64_t seed = 0;
  double d_model = 818.0;
  double warmup = 4000.0;
  double lr_scale = 1.0;
  double validation = 0.1;
  bool no_dropout = false;
  std::size_t hidden = 50;
  std::size_t freq_hidden = 50;
};

std::map<std::string, std::map<std::uint64_t, double>> read_targets(
    const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open targets " + path.string());
  std::map<std::string, std::map<std::uint64_t, double>> targets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("manifest")) continue;
    try {
      const double t = j.at("target").get<double>();
      if (!(t >= 0.0 && t <= 1.0)) throw DataError("target outside [0, 1]");
      targets[j.at("event").get<std::string>()][j.at("id").get<std::uint64_t>()] = t;
    } catch (const json::exception&) {
      throw DataError("targets line " + std::to_string(line_no) +
                      " is malformed");
    }
  }
  return targets;
}

json epoch_log_json(const TrainResult& r) {
  json log = json::array();
  for (const auto& e : r.log) {
    log.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"validation_loss", e.validation_loss}});
  }
  return json{{"epochs", log},
              {"best_epoch", r.best_epoch},
              {"best_validation_loss", r.best_validation_loss},
              {"constant_validation_loss", r.constant_validation_loss},
              {"train_size", r.train_size},
              {"validation_size", r.validation_size}};
}

void print_log(const std::string& label, const TrainResult& r, Session& s) {
  for (const auto& w : r.warnings) s.warn(w);
  for (const auto& e : r.log) {
    s.out << label << "epoch " << e.epoch << ": train mse " << std::setprecision(6)
          << e.train_loss << ", validation mse " << e.validation_loss << '\n';
  }
  s.out << label << "best epoch " << r.best_epoch
        << ", constant-predictor validation mse "
        << r.constant_validation_loss << '\n';
}

int run_train(const TrainOptions& o, Session& s) {
  const Corpus corpus = load_corpus(o.stream, s);
  const Vocab vocab = Vocab::load(o.vocab);
  const Provider provider = make_provider(o.provider);
  const auto targets = read_targets(o.targets);

  std::vector<std::string> names;
  for (const auto& [event, _] : targets) {
    if (corpus.events.contains(event)) {
      names.push_back(event);
    } else {
      s.warn("targets for event " + event + " have no stream; ignored");
    }
  }
  auto events = parallel_map(names.size(), s.jobs, [&](std::size_t i) {
    const auto& batches = corpus.events.at(names[i]);
    EventExamples e;
    e.event_id = names[i];
    e.examples = assemble_examples(batches, targets.at(names[i]), vocab,
                                   *provider.embedder);
    for (const auto& b : batches) e.tweet_count += b.tweets.size();
    return e;
  });

  NetShape shape;
  shape.freq_dim = vocab.frequency_dim();
  shape.emb_dim = provider.embedder->dimension();
  shape.freq_hidden = o.freq_hidden;
  shape.hidden = o.hidden;

  TrainConfig config;
  config.epochs = o.epochs;
  config.batch_size = o.batch;
  config.seed = o.seed;
  config.validation_fraction = o.validation;
  config.dropout = !o.no_dropout;
  config.schedule = NoamSchedule{o.d_model, o.warmup, o.lr_scale};

  if (o.folds <= 1) {
    std::vector<TrainingExample> all;
    for (auto& e : events) {
      all.insert(all.end(), std::make_move_iterator(e.examples.begin()),
                 std::make_move_iterator(e.examples.end()));
    }
    const TrainResult r =
        train(all, SalienceNet::glorot(shape, mix_seed(o.seed, 1000)), config);
    print_log("", r, s);
    save_checkpoint(o.out, r.net, &r.adam);
    write_json(o.out + ".manifest.json", s.manifest());
    write_json(o.log.empty() ? o.out + ".log.json" : o.log,
               json{{"manifest", s.manifest()}, {"training", epoch_log_json(r)}});
    s.out << "wrote " << o.out << '\n';
    return 0;
  }

  const CrossValidation cv = cross_validate(events, shape, config, o.folds);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  json folds = json::array();
  for (std::size_t f = 0; f < cv.folds.size(); ++f) {
    const FoldModel& fold = cv.folds[f];
    const std::string name = "fold_" + std::to_string(f) + ".tsn";
    print_log("fold " + std::to_string(f) + " ", fold.training, s);
    save_checkpoint(dir / name, fold.training.net, &fold.training.adam);
    folds.push_back({{"model", name},
                     {"held_out", fold.held_out},
                     {"training", epoch_log_json(fold.training)}});
  }
  write_json(dir / "folds.json", json{{"manifest", s.manifest()}, {"folds", folds}});
  s.out << "wrote " << cv.folds.size() << " fold models to " << dir.string()
        << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// summarize

struct SummarizeOptions {
  std::string stream, vocab, model, folds, gold, out;
  ProviderOptions provider;
  double lambda_salience = 0.2;
  double lambda_similarity = 0.3;
  std::string cap = "tweets:20";
};

int run_summarize(const SummarizeOptions& o, Session& s) {
  if (o.model.empty() == o.folds.empty()) {
    throw UsageError("summarize needs exactly one of --model or --folds");
  }
  const Corpus corpus = load_corpus(o.stream, s);
  const Vocab vocab = Vocab::load(o.vocab);
  const Provider provider = make_provider(o.provider);
  std::optional<GoldStandard> gold;
  if (!o.gold.empty()) gold = load_gold(o.gold, s);

  SelectionConfig config;
  config.lambda_salience = o.lambda_salience;
  config.lambda_sim_base = o.lambda_similarity;
  config.cap = CapSpec::parse(o.cap);
  if (config.cap.mode == CapMode::kWords && !config.cap.words && !gold) {
    throw UsageError("--cap words:gold requires --gold");
  }

  // Model per event: one checkpoint, or the fold that held the event out.
  std::map<std::string, std::shared_ptr<const SalienceNet>> models;
  if (!o.model.empty()) {
    auto net = std::make_shared<const SalienceNet>(load_checkpoint(o.model).net);
    for (const auto& [event, _] : corpus.events) models[event] = net;
  } else {
    std::ifstream in(o.folds);
    if (!in) throw DataError("cannot open " + o.folds);
    const json doc = json::parse(in, nullptr, false);
    if (!doc.is_object() || !doc.contains("folds")) {
      throw DataError(o.folds + " is not a folds manifest");
    }
    const fs::path base = fs::path(o.folds).parent_path();
    for (const auto& fold : doc["folds"]) {
      auto net = std::make_shared<const SalienceNet>(
          load_checkpoint(base / fold.at("model").get<std::string>()).net);
      for (const auto& event : fold.at("held_out")) {
        models[event.get<std::string>()] = net;
      }
    }
  }

  std::vector<std::string> names;
  for (const auto& [event, _] : corpus.events) {
    if (!models.contains(event)) {
      throw DataError("no model holds out event " + event);
    }
    names.push_back(event);
  }
  const GoldStandard* gold_ptr = gold ? &*gold : nullptr;
  const auto summaries = parallel_map(names.size(), s.jobs, [&](std::size_t i) {
    return summarize_event(corpus.events.at(names[i]), *models.at(names[i]),
                           vocab, *provider.embedder, config, gold_ptr);
  });

  auto file = open_output(o.out);
  write_summary_header(file, s.manifest());
  for (std::size_t i = 0; i < names.size(); ++i) {
    write_summary_entries(file, names[i], summaries[i].summary.entries());
    s.out << names[i] << ": " << summaries[i].summary.size() << " tweets, "
          << summaries[i].summary.word_length() << " words\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate / baseline

struct SystemScores {
  std::string name;
  std::string size_label;
  std::vector<DayScores> days;
  Aggregates aggregates;
};

json aggregates_json(const Aggregates& a) {
  auto metric = [](const MetricAggregate& m) {
    return json{{"micro", m.micro}, {"macro", m.macro}};
  };
  return json{{"rouge1_f", metric(a.rouge1_f)},
              {"rouge2_f", metric(a.rouge2_f)},
              {"cos_embed", metric(a.cos_embed)},
              {"days", a.days},
              {"events", a.events}};
}

json days_json(std::span<const DayScores> days) {
  json out = json::array();
  for (const auto& d : days) {
    auto rouge = [](const RougeScore& r) {
      return json{{"p", r.precision}, {"r", r.recall}, {"f", r.f1}};
    };
    out.push_back({{"event", d.event_id},
                   {"day", d.day},
                   {"rouge1", rouge(d.rouge1)},
                   {"rouge2", rouge(d.rouge2)},
                   {"cos_embed", d.cos_embed}});
  }
  return out;
}

void print_table(std::span<const SystemScores> systems, bool cosine,
                 std::ostream& out) {
  out << std::left << std::setw(16) << "system" << std::right;
  for (const char* h : {"R1-F micro", "R1-F macro", "R2-F micro", "R2-F macro",
                        "COS micro", "COS macro"}) {
    out << std::setw(12) << h;
  }
  out << "  size\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& sys : systems) {
    const Aggregates& a = sys.aggregates;
    out << std::left << std::setw(16) << sys.name << std::right;
    for (double v : {a.rouge1_f.micro, a.rouge1_f.macro, a.rouge2_f.micro,
                     a.rouge2_f.macro}) {
      out << std::setw(12) << v;
    }
    for (double v : {a.cos_embed.micro, a.cos_embed.macro}) {
      if (cosine) {
        out << std::setw(12) << v;
      } else {
        out << std::setw(12) << "-";
      }
    }
    out << "  " << sys.size_label << '\n';
  }
}

std::vector<DayPool> day_pools(const Corpus& corpus, const GoldStandard& gold) {
  std::vector<DayPool> pools;
  for (const auto& [event, batches] : corpus.events) {
    for (const auto& b : batches) {
      const std::string* g = gold.find(event, b.increment.day_index);
      if (!g) continue;
      DayPool pool;
      pool.event_id = event;
      pool.day = b.increment.day_index;
      for (const auto& t : b.tweets) pool.texts.push_back(t.text);
      pool.word_budget = word_count(*g);
      pool.reference = *g;
      pools.push_back(std::move(pool));
    }
  }
  return pools;
}

struct EvaluateOptions {
  std::string gold, stream, out;
  std::vector<std::string> summaries;
  SifOptions sif;
  std::size_t baseline_runs = 0;
  std::uint64_t seed = 0;
};

json significance_json(const SystemScores& sys, const SystemScores& ref) {
  json out = {{"system", sys.name}, {"reference", ref.name}};
  auto test = [&](auto pick) -> json {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < sys.days.size(); ++i) {
      x.push_back(pick(sys.days[i]));
      y.push_back(pick(ref.days[i]));
    }
    try {
      const WilcoxonResult w = wilcoxon_signed_rank(x, y);
      return json{{"w", w.statistic}, {"p", w.p_value}, {"n", w.n},
                  {"exact", w.exact}};
    } catch (const DataError&) {
      return json{{"degenerate", true}};
    }
  };
  out["rouge1_f"] = test([](const DayScores& d) { return d.rouge1.f1; });
  out["rouge2_f"] = test([](const DayScores& d) { return d.rouge2.f1; });
  out["cos_embed"] = test([](const DayScores& d) { return d.cos_embed; });
  return out;
}

int run_evaluate(const EvaluateOptions& o, Session& s) {
  const GoldStandard gold = load_gold(o.gold, s);
  std::optional<Corpus> corpus;
  if (!o.stream.empty()) corpus = load_corpus(o.stream, s);
  if (o.baseline_runs > 0 && !corpus) {
    throw UsageError("--baseline-runs needs --stream");
  }

  // Evaluated days: every gold day of the stream's events (all gold days
  // without a stream). Days without gold never count.
  std::vector<GoldStandard::Key> days;
  for (const auto& [key, _] : gold.entries()) {
    if (!corpus || corpus->events.contains(key.first)) days.push_back(key);
  }
  if (days.empty()) throw DataError("no gold days to evaluate");

  struct Loaded {
    std::string name, path, size_label;
    std::map<GoldStandard::Key, std::vector<std::string>> texts;
  };
  std::vector<Loaded> loaded;
  for (const auto& spec : o.summaries) {
    Loaded l;
    const auto eq = spec.find('=');
    l.name = eq == std::string::npos ? fs::path(spec).stem().string()
                                     : spec.substr(0, eq);
    l.path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const SummaryFile file = read_summary(fs::path(l.path));
    l.size_label = "-";
    if (file.manifest.is_object() && file.manifest.contains("argv")) {
      const auto& argv = file.manifest["argv"];
      for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
        if (argv[i] == "--cap") l.size_label = argv[i + 1].get<std::string>();
      }
      if (l.size_label == "-") l.size_label = "tweets:20";
    }
    for (const auto& r : file.records) l.texts[{r.event_id, r.day}].push_back(r.text);
    loaded.push_back(std::move(l));
  }

  std::vector<std::string> candidates;
  for (const auto& l : loaded) {
    for (const auto& key : days) {
      const auto it = l.texts.find(key);
      candidates.push_back(it == l.texts.end() ? "" : join(it->second, " "));
    }
  }
  std::vector<std::string> pc_texts = gold_texts(gold);
  pc_texts.insert(pc_texts.end(), candidates.begin(), candidates.end());
  const auto sif = load_sif(o.sif, corpus ? corpus->texts() : pc_texts, pc_texts);

  std::vector<SystemScores> systems;
  for (std::size_t k = 0; k < loaded.size(); ++k) {
    SystemScores sys;
    sys.name = loaded[k].name;
    sys.size_label = loaded[k].size_label;
    sys.days = parallel_map(days.size(), s.jobs, [&](std::size_t d) {
      return score_day(days[d].first, days[d].second,
                       candidates[k * days.size() + d], *gold.find(days[d].first, days[d].second),
                       sif.get());
    });
    sys.aggregates = aggregate(sys.days);
    systems.push_back(std::move(sys));
  }

  json report = {{"manifest", s.manifest()}};
  json systems_json = json::array();
  for (std::size_t k = 0; k < systems.size(); ++k) {
    systems_json.push_back({{"name", systems[k].name},
                            {"path", loaded[k].path},
                            {"aggregates", aggregates_json(systems[k].aggregates)},
                            {"days", days_json(systems[k].days)}});
  }
  report["systems"] = systems_json;

  std::vector<SystemScores> table = systems;
  if (o.baseline_runs > 0) {
    const auto pools = day_pools(*corpus, gold);
    const BaselineReport b = random_baseline(pools, sif.get(), o.baseline_runs, o.seed);
    report["baseline"] = {{"runs", b.runs},
                          {"seed", o.seed},
                          {"aggregates", aggregates_json(b.mean)},
                          {"days", days_json(b.day_means)}};
    table.insert(table.begin(), SystemScores{"Randoms", "G.S. length", b.day_means, b.mean});
  }
  json significance = json::array();
  for (std::size_t k = 1; k < systems.size(); ++k) {
    significance.push_back(significance_json(systems[k], systems[0]));
  }
  report["significance"] = significance;

  write_json(o.out, report);
  print_table(table, true, s.out);
  return 0;
}

struct BaselineOptions {
  std::string stream, gold, out;
  SifOptions sif;
  std::size_t runs = kBaselineRuns;
  std::uint64_t seed = 0;
};

int run_baseline(const BaselineOptions& o, Session& s) {
  const Corpus corpus = load_corpus(o.stream, s);
  const GoldStandard gold = load_gold(o.gold, s);
  const auto pools = day_pools(corpus, gold);
  if (pools.empty()) throw DataError("no gold days to evaluate");
  std::unique_ptr<SifModel> sif;
  if (!o.sif.word_vectors.empty()) {
    sif = load_sif(o.sif, corpus.texts(), stream_and_gold(corpus, gold));
  }
  const BaselineReport b = random_baseline(pools, sif.get(), o.runs, o.seed);
  write_json(o.out, json{{"manifest", s.manifest()},
                         {"baseline", {{"runs", b.runs},
                                       {"seed", o.seed},
                                       {"aggregates", aggregates_json(b.mean)},
                                       {"days", days_json(b.day_means)}}}});
  const SystemScores row{"Randoms", "G.S. length", b.day_means, b.mean};
  print_table(std::span<const SystemScores>(&row, 1), sif != nullptr, s.out);
  return 0;
}

void add_provider_options(CLI::App* cmd, ProviderOptions& p) {
  cmd->add_option("--embeddings", p.embeddings,
                  "TEB1 embedding file; tweets missing from it use the "
                  "token-hash fallback")
      ->check(CLI::ExistingFile);
  cmd->add_option("--embedding-dim", p.dimension,
                  "Fallback embedding width when no --embeddings file is given")
      ->capture_default_str();
  cmd->add_option("--seed", p.seed, "Fallback embedding seed")
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Incremental extractive summarization of tweet streams", "tweetsum"};
  app.set_config("--config", "", "key = value file supplying any flag");
  app.require_subcommand(1);
  Session session{out, err, args, "", "", 1};
  app.add_option("--jobs", session.jobs, "Events processed in parallel")
      ->capture_default_str();

  ValidateOptions validate;
  auto* v = app.add_subcommand("validate", "Check input files and print corpus statistics");
  v->add_option("--stream", validate.stream, "Tweet stream (JSON Lines)")->required()->check(CLI::ExistingFile);
  v->add_option("--gold", validate.gold, "Gold summaries (JSON Lines)")->check(CLI::ExistingFile);
  v->add_option("--embeddings", validate.embeddings, "TEB1 embedding file")->check(CLI::ExistingFile);
  v->add_option("--vocab", validate.vocab, "Vocabulary file")->check(CLI::ExistingFile);

  OracleOptions oracle;
  auto* o = app.add_subcommand("oracle", "Build greedy oracle summaries for every gold day");
  o->add_option("--stream", oracle.stream)->required()->check(CLI::ExistingFile);
  o->add_option("--gold", oracle.gold)->required()->check(CLI::ExistingFile);
  o->add_option("--out", oracle.out, "Oracle JSON Lines output")->required();
  o->add_option("--metric", oracle.metric, "rouge2_f, cosine or both")
      ->check(CLI::IsMember({"both", "rouge2_f", "cosine"}))
      ->capture_default_str();
  oracle.sif.add_to(o, false);

  TargetsOptions targets;
  auto* t = app.add_subcommand("targets", "Compute salience training targets");
  t->add_option("--stream", targets.stream)->required()->check(CLI::ExistingFile);
  t->add_option("--gold", targets.gold)->required()->check(CLI::ExistingFile);
  t->add_option("--oracle", targets.oracle, "Oracle file from the oracle command")
      ->required()->check(CLI::ExistingFile);
  t->add_option("--oracle-metric", targets.oracle_metric,
                "Which oracle's tweets get target 1")
      ->check(CLI::IsMember({"rouge2_f", "cosine"}))
      ->capture_default_str();
  t->add_option("--out", targets.out, "Targets JSON Lines output")->required();
  targets.sif.add_to(t, true);

  TrainOptions trainopt;
  auto* tr = app.add_subcommand("train", "Train the salience network");
  tr->add_option("--stream", trainopt.stream)->required()->check(CLI::ExistingFile);
  tr->add_option("--targets", trainopt.targets)->required()->check(CLI::ExistingFile);
  tr->add_option("--vocab", trainopt.vocab)->required()->check(CLI::ExistingFile);
  tr->add_option("--out", trainopt.out,
                 "Checkpoint path, or output directory with --folds")
      ->required();
  tr->add_option("--log", trainopt.log, "Training log (JSON)");
  tr->add_option("--folds", trainopt.folds, "Cross-validation folds (0: train once)")
      ->capture_default_str();
  tr->add_option("--epochs", trainopt.epochs)->capture_default_str();
  tr->add_option("--batch", trainopt.batch)->capture_default_str();
  tr->add_option("--train-seed", trainopt.seed, "Shuffling, dropout and init seed")
      ->capture_default_str();
  tr->add_option("--d-model", trainopt.d_model)->capture_default_str();
  tr->add_option("--warmup", trainopt.warmup)->capture_default_str();
  tr->add_option("--lr-scale", trainopt.lr_scale)->capture_default_str();
  tr->add_option("--validation", trainopt.validation, "Validation fraction")
      ->capture_default_str();
  tr->add_flag("--no-dropout", trainopt.no_dropout);
  tr->add_option("--hidden", trainopt.hidden)->capture_default_str();
  tr->add_option("--freq-hidden", trainopt.freq_hidden)->capture_default_str();
  add_provider_options(tr, trainopt.provider);

  SummarizeOptions summarize;
  auto* su = app.add_subcommand("summarize", "Summarize every event of a stream");
  su->add_option("--stream", summarize.stream)->required()->check(CLI::ExistingFile);
  su->add_option("--vocab", summarize.vocab)->required()->check(CLI::ExistingFile);
  su->add_option("--model", summarize.model, "Checkpoint used for every event")
      ->check(CLI::ExistingFile);
  su->add_option("--folds", summarize.folds,
                 "folds.json from train --folds; each event uses the model "
                 "that held it out")
      ->check(CLI::ExistingFile);
  su->add_option("--gold", summarize.gold, "Gold summaries (for --cap words:gold)")
      ->check(CLI::ExistingFile);
  su->add_option("--out", summarize.out, "Summary JSON Lines output")->required();
  su->add_option("--lambda-salience", summarize.lambda_salience)
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  su->add_option("--lambda-similarity", summarize.lambda_similarity)
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  su->add_option("--cap", summarize.cap, "tweets:N, words:N or words:gold")
      ->capture_default_str();
  add_provider_options(su, summarize.provider);

  EvaluateOptions evaluate;
  auto* ev = app.add_subcommand("evaluate", "Score summaries against gold");
  ev->add_option("--gold", evaluate.gold)->required()->check(CLI::ExistingFile);
  ev->add_option("--summary", evaluate.summaries, "name=path of a summary file (repeatable)")
      ->required();
  ev->add_option("--stream", evaluate.stream,
                 "Tweet stream: restricts events, feeds word probabilities and "
                 "the random baseline")
      ->check(CLI::ExistingFile);
  ev->add_option("--out", evaluate.out, "Report (JSON)")->required();
  ev->add_option("--baseline-runs", evaluate.baseline_runs)->capture_default_str();
  ev->add_option("--seed", evaluate.seed, "Random baseline seed")->capture_default_str();
  evaluate.sif.add_to(ev, true);

  BaselineOptions baseline;
  auto* b = app.add_subcommand("baseline", "Average of random gold-length summaries");
  b->add_option("--stream", baseline.stream)->required()->check(CLI::ExistingFile);
  b->add_option("--gold", baseline.gold)->required()->check(CLI::ExistingFile);
  b->add_option("--out", baseline.out, "Report (JSON)")->required();
  b->add_option("--runs", baseline.runs)->capture_default_str();
  b->add_option("--seed", baseline.seed)->capture_default_str();
  baseline.sif.add_to(b, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << json{{"error", "usage"}, {"exit_code", 1}, {"message", e.what()}}.dump()
        << '\n';
    return 1;
  }

  // The manifest keeps global options and those of the command that ran.
  const CLI::App* active = app.get_subcommands().front();
  std::istringstream all(app.config_to_str(true, false));
  for (std::string line; std::getline(all, line);) {
    const auto key_end = line.find('=');
    const auto dot = line.find('.');
    if (dot >= key_end || line.compare(0, dot, active->get_name()) == 0) {
      session.effective_config += line + '\n';
    }
  }
  try {
    if (*v) return session.command = "validate", run_validate(validate, session);
    if (*o) return session.command = "oracle", run_oracle(oracle, session);
    if (*t) return session.command = "targets", run_targets(targets, session);
    if (*tr) return session.command = "train", run_train(trainopt, session);
    if (*su) return session.command = "summarize", run_summarize(summarize, session);
    if (*ev) return session.command = "evaluate", run_evaluate(evaluate, session);
    if (*b) return session.command = "baseline", run_baseline(baseline, session);
  } catch (const Error& e) {
    const int code = static_cast<int>(e.kind());
    err << json{{"error", error_kind_name(e.kind())},
                {"exit_code", code},
                {"message", e.what()}}
               .dump()
        << '\n';
    return code;
  } catch (const std::exception& e) {
    err << json{{"error", "data"}, {"exit_code", 2}, {"message", e.what()}}.dump()
        << '\n';
    return 2;
  }
  return 1;
}

}  // namespace tweetsum::cli
