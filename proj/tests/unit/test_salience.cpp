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
#include <sstream>

#include <doctest.h>

#include "oracles.hpp"
#include "tweetsum/error.hpp"
#include "tweetsum/rng.hpp"
#include "tweetsum/salience.hpp"

using namespace tweetsum;

namespace {

FrequencyVector sparse(std::vector<double> dense) {
  FrequencyVector f;
  f.dimension = dense.size();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      f.indices.push_back(static_cast<std::uint32_t>(i));
      f.values.push_back(dense[i]);
    }
  }
  return f;
}

// Widths 3/2/2/1 with a 2-dim embedding; hand values computed in exact
// rational arithmetic: h1 = (9/40, 13/40), h2 = (197/400, 103/400),
// score = 1517/2000.
SalienceNet hand_net() {
  SalienceNet net(NetShape{3, 2, 2, 2});
  const std::vector<double> w1{0.2, -0.4, 0.6, 0.1, -0.3, 0.8};
  const std::vector<double> w2{0.7, -0.5, 0.2, 0.9, -0.6, 0.4, 1.1, 0.3};
  std::copy(w1.begin(), w1.end(), net.w1().begin());
  net.b1()[0] = 0.05;
  net.b1()[1] = 0.3;
  std::copy(w2.begin(), w2.end(), net.w2().begin());
  net.b2()[0] = 0.1;
  net.b2()[1] = 0.4;
  net.w3()[0] = 1.5;
  net.w3()[1] = -0.7;
  net.b3() = 0.2;
  return net;
}

const NetShape kSmall{5, 3, 3, 4};

}  // namespace

TEST_SUITE("salience") {

TEST_CASE("parameter layout") {
  const NetShape full;
  CHECK(full.concat_dim() == 818);
  CHECK(full.parameter_count() == 30525 * 50 + 50 + 818 * 50 + 50 + 50 + 1);
  SalienceNet net(kSmall);
  CHECK(net.params().size() == kSmall.parameter_count());
  CHECK(net.w1().data() == net.params().data());
  CHECK(&net.b3() == &net.params().back());
  CHECK(net.w1_row(2).data() == net.w1().data() + 2 * kSmall.freq_hidden);
}

TEST_CASE("forward on degenerate nets") {
  SalienceNet zero(kSmall);
  const auto f = sparse({0.2, 0.0, 0.8, 0.0, 0.0});
  const std::vector<double> emb{1.0, -2.0, 3.0};
  CHECK(forward(zero, f, emb) == 0.0);

  SalienceNet bias_only(kSmall);
  for (double& w : bias_only.w3()) w = 5.0;
  bias_only.b3() = 0.42;
  CHECK(forward(bias_only, f, emb) == 0.42);
}

TEST_CASE("forward matches hand arithmetic") {
  const SalienceNet net = hand_net();
  const std::vector<double> freq{0.5, 0.25, 0.25}, emb{0.3, -0.2};
  CHECK(std::abs(forward(net, sparse(freq), emb) - 0.7585) < 1e-12);
  CHECK(std::abs(testing::dense_forward(net, freq, emb) - 0.7585) < 1e-12);
}

TEST_CASE("forward agrees with dense products on random nets") {
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const SalienceNet net = testing::random_small_net(kSmall, rng);
    const auto ex = testing::random_example(kSmall, rng);
    CHECK(std::abs(forward(net, ex.freq, ex.emb) -
                   testing::dense_forward(net, ex.freq.dense(), ex.emb)) < 1e-12);
  }
}

TEST_CASE("forward rejects mismatched inputs and non-finite results") {
  SalienceNet net(kSmall);
  const auto ex = [] {
    Rng rng(1);
    return testing::random_example(kSmall, rng);
  }();
  const std::vector<double> short_emb{1.0};
  CHECK_THROWS_AS(forward(net, ex.freq, short_emb), DataError);
  net.b3() = std::nan("");
  CHECK_THROWS_AS(forward(net, ex.freq, ex.emb), NumericError);
}

TEST_CASE("squared error loss") {
  CHECK(loss(0.5, 0.5) == 0.0);
  CHECK(loss(1.0, 0.0) == 1.0);
  CHECK(loss(0.3, 0.7) == doctest::Approx(0.16).epsilon(1e-15));
}

TEST_CASE("gradient hand cases") {
  Rng rng(4);
  SUBCASE("zero net, single example") {
    const SalienceNet net(kSmall);
    auto ex = testing::random_example(kSmall, rng);
    ex.target = 0.35;
    const std::vector<TrainingExample> batch{ex};
    const auto g = grad(net, batch, false, 0);
    CHECK(g.grads.b3() == doctest::Approx(-0.7).epsilon(1e-15));
    for (double x : g.grads.w1()) CHECK(x == 0.0);
    for (double x : g.grads.w2()) CHECK(x == 0.0);
    CHECK(g.loss == doctest::Approx(0.35 * 0.35).epsilon(1e-15));
  }
  SUBCASE("scores equal targets") {
    SalienceNet net(kSmall);
    net.b3() = 0.6;
    std::vector<TrainingExample> batch;
    for (int i = 0; i < 4; ++i) {
      batch.push_back(testing::random_example(kSmall, rng));
      batch.back().target = 0.6;
    }
    const auto g = grad(net, batch, false, 0);
    for (double x : g.grads.params()) CHECK(x == 0.0);
  }
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(99);
  int checked = 0;
  while (checked < 10) {
    const SalienceNet net = testing::random_small_net(kSmall, rng);
    std::vector<TrainingExample> batch;
    double margin = INFINITY;
    for (int i = 0; i < 3; ++i) {
      batch.push_back(testing::random_example(kSmall, rng));
      margin = std::min(margin, testing::relu_margin(net, batch.back().freq.dense(),
                                                     batch.back().emb));
    }
    if (margin < 1e-3) continue;  // a step of h could cross a ReLU kink
    const auto analytic = grad(net, batch, false, 0);
    const auto numeric = testing::finite_difference_grad(net, batch, 1e-5);
    CHECK(testing::max_relative_error(analytic.grads.params(), numeric) < 1e-4);
    ++checked;
  }
}

TEST_CASE("training-mode gradient uses the forward dropout masks") {
  Rng rng(12);
  const SalienceNet net = testing::random_small_net(kSmall, rng);
  std::vector<TrainingExample> batch{testing::random_example(kSmall, rng),
                                     testing::random_example(kSmall, rng)};
  const std::uint64_t seed = 77;
  const auto g = grad(net, batch, true, seed);
  double expected = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    expected += loss(forward(net, batch[k].freq, batch[k].emb, true, example_seed(seed, k)),
                     batch[k].target);
  }
  CHECK(g.loss == doctest::Approx(expected / 2.0).epsilon(1e-14));
}

TEST_CASE("inverted dropout preserves the expected score") {
  // Positive weights and inputs keep every unit active under any mask, so
  // the score is linear in the masks and its mean is the eval-mode score.
  SalienceNet net(kSmall);
  Rng rng(5);
  for (double& x : net.params()) x = rng.uniform(0.1, 1.0);
  const auto f = sparse({0.1, 0.2, 0.3, 0.2, 0.2});
  const std::vector<double> emb{0.5, 0.2, 0.9};
  const double eval = forward(net, f, emb);
  double sum = 0.0;
  const int runs = 10000;
  for (int s = 0; s < runs; ++s) sum += forward(net, f, emb, true, static_cast<std::uint64_t>(s));
  CHECK(std::abs(sum / runs - eval) < 0.02 * std::abs(eval));
  CHECK(forward(net, f, emb, true, 3) == forward(net, f, emb, true, 3));
}

TEST_CASE("Adam steps") {
  SUBCASE("first step under unit gradient moves by lr") {
    std::vector<double> p{1.0, -2.0}, g{1.0, 1.0};
    AdamState s(2);
    adam_step(p, g, s, 0.01);
    CHECK(s.t == 1);
    CHECK(p[0] == doctest::Approx(1.0 - 0.01 / (1.0 + 1e-8)).epsilon(1e-15));
  }
  SUBCASE("zero gradient leaves parameters in place") {
    std::vector<double> p{1.0, -2.0}, g{0.0, 0.0};
    AdamState s(2);
    adam_step(p, g, s, 0.01);
    CHECK(p == std::vector<double>{1.0, -2.0});
    CHECK(s.t == 1);
  }
  SUBCASE("two steps under constant gradient match the recurrences") {
    const double lr = 0.05, g = 0.5, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double m = 0, v = 0, theta = 0.3;
    for (int t = 1; t <= 2; ++t) {
      m = b1 * m + (1 - b1) * g;
      v = b2 * v + (1 - b2) * g * g;
      const double mh = m / (1 - std::pow(b1, t));
      const double vh = v / (1 - std::pow(b2, t));
      theta -= lr * mh / (std::sqrt(vh) + eps);
    }
    std::vector<double> p{0.3}, grads{g};
    AdamState s(1);
    adam_step(p, grads, s, lr);
    adam_step(p, grads, s, lr);
    CHECK(std::abs(p[0] - theta) < 1e-10);
    CHECK(std::abs(s.m[0] - m) < 1e-12);
    CHECK(std::abs(s.v[0] - v) < 1e-12);
  }
}

TEST_CASE("Noam schedule") {
  CHECK(noam_lr(4000, 818, 4000) ==
        doctest::Approx(std::pow(818.0, -0.5) * std::pow(4000.0, -0.5)).epsilon(1e-14));
  CHECK(noam_lr(1, 818, 4000) ==
        doctest::Approx(std::pow(818.0, -0.5) * std::pow(4000.0, -1.5)).epsilon(1e-14));
  CHECK(noam_lr(8000, 818, 4000) / noam_lr(4000, 818, 4000) ==
        doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(noam_lr(0, 818, 4000), UsageError);
  const NoamSchedule s{818, 4000, 3.0};
  CHECK(s(10) == doctest::Approx(3.0 * noam_lr(10, 818, 4000)).epsilon(1e-15));
}

TEST_CASE("training") {
  Rng rng(21);
  std::vector<TrainingExample> data;
  for (int i = 0; i < 640; ++i) {
    data.push_back(testing::random_example(kSmall, rng));
    data.back().target = 0.5;
  }
  TrainConfig config;
  config.batch_size = 32;
  config.epochs = 8;
  config.seed = 3;
  config.schedule = NoamSchedule{818, 10, 2.0};

  SUBCASE("zero net learns a constant target") {
    const auto r = train(data, SalienceNet(kSmall), config);
    REQUIRE(r.log.size() == 8);
    CHECK(r.validation_size == 64);
    CHECK(r.train_size == 576);
    CHECK(r.log[1].validation_loss < r.log[0].validation_loss);
    CHECK(r.log[2].validation_loss < r.log[1].validation_loss);
    CHECK(std::abs(r.net.b3() - 0.5) < 0.05);
    CHECK(r.best_validation_loss < 0.0025);
    CHECK(r.constant_validation_loss == 0.0);
  }
  SUBCASE("same seed, same parameters") {
    config.epochs = 2;
    const auto init = SalienceNet::glorot(kSmall, 1);
    const auto a = train(data, init, config);
    const auto b = train(data, init, config);
    CHECK(std::equal(a.net.params().begin(), a.net.params().end(), b.net.params().begin()));
    config.seed = 4;
    const auto c = train(data, init, config);
    CHECK_FALSE(std::equal(a.net.params().begin(), a.net.params().end(), c.net.params().begin()));
  }
  SUBCASE("zero epochs return the initial net") {
    config.epochs = 0;
    const auto init = SalienceNet::glorot(kSmall, 1);
    const auto r = train(data, init, config);
    CHECK(std::equal(r.net.params().begin(), r.net.params().end(), init.params().begin()));
    CHECK(r.best_epoch == 0);
  }
  SUBCASE("tiny datasets train as one batch without validation") {
    std::vector<TrainingExample> tiny(data.begin(), data.begin() + 5);
    const auto r = train(tiny, SalienceNet(kSmall), config);
    CHECK(r.validation_size == 0);
    CHECK(r.train_size == 5);
    CHECK(r.warnings.size() == 2);
  }
  SUBCASE("empty dataset") {
    CHECK_THROWS_AS(train({}, SalienceNet(kSmall), config), DataError);
  }
}

TEST_CASE("Glorot initialization") {
  const auto a = SalienceNet::glorot(kSmall, 5);
  const auto b = SalienceNet::glorot(kSmall, 5);
  CHECK(std::equal(a.params().begin(), a.params().end(), b.params().begin()));
  const double limit = std::sqrt(6.0 / (kSmall.freq_dim + kSmall.freq_hidden));
  for (double w : a.w1()) CHECK(std::abs(w) <= limit);
  for (double x : a.b1()) CHECK(x == 0.0);
  CHECK(a.b3() == 0.0);
}

TEST_CASE("fold packing") {
  const std::vector<std::size_t> sizes{10, 9, 9, 1, 1};
  const auto folds = pack_folds(sizes, 3);
  std::vector<std::size_t> loads;
  for (const auto& f : folds) {
    std::size_t load = 0;
    for (auto e : f) load += sizes[e];
    loads.push_back(load);
  }
  CHECK(loads == std::vector<std::size_t>{10, 10, 10});
  CHECK(folds[0] == std::vector<std::size_t>{0});
  CHECK(folds[1] == std::vector<std::size_t>{1, 3});
  CHECK(folds[2] == std::vector<std::size_t>{2, 4});

  const std::vector<std::size_t> equal{4, 4, 4};
  for (const auto& f : pack_folds(equal, 3)) CHECK(f.size() == 1);
  CHECK_THROWS_AS(pack_folds(equal, 0), UsageError);
}

TEST_CASE("cross-validation holds every event out exactly once") {
  Rng rng(31);
  std::vector<EventExamples> events;
  for (int e = 0; e < 4; ++e) {
    EventExamples ev;
    ev.event_id = "e" + std::to_string(e);
    for (int i = 0; i < 20 + 5 * e; ++i) ev.examples.push_back(testing::random_example(kSmall, rng));
    ev.tweet_count = ev.examples.size();
    events.push_back(std::move(ev));
  }
  TrainConfig config;
  config.epochs = 1;
  config.batch_size = 16;
  const auto cv = cross_validate(events, kSmall, config, 3);
  REQUIRE(cv.folds.size() == 3);
  std::map<std::string, int> seen;
  for (const auto& f : cv.folds) {
    for (const auto& e : f.held_out) ++seen[e];
  }
  CHECK(seen.size() == 4);
  for (const auto& [e, n] : seen) CHECK(n == 1);
  for (const auto& ev : events) {
    CHECK(cv.predictions.at(ev.event_id).size() == ev.examples.size());
  }
  CHECK_THROWS_AS(cross_validate(std::span(events).first(2), kSmall, config, 3), DataError);
}

TEST_CASE("checkpoint round trip") {
  Rng rng(2);
  const SalienceNet net = testing::random_small_net(kSmall, rng);
  AdamState adam(net.params().size());
  adam.t = 7;
  for (std::size_t i = 0; i < adam.m.size(); ++i) {
    adam.m[i] = 0.1 * static_cast<double>(i);
    adam.v[i] = 0.01 * static_cast<double>(i);
  }
  std::stringstream buf;
  write_checkpoint(buf, net, &adam);
  const Checkpoint c = read_checkpoint(buf);
  CHECK(c.net.shape() == kSmall);
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    CHECK(c.net.params()[i] == static_cast<double>(static_cast<float>(net.params()[i])));
  }
  REQUIRE(c.adam.has_value());
  CHECK(c.adam->t == 7);
  CHECK(c.adam->m == adam.m);
  CHECK(c.adam->v == adam.v);

  std::stringstream bare;
  write_checkpoint(bare, net);
  CHECK_FALSE(read_checkpoint(bare).adam.has_value());

  std::stringstream full;
  write_checkpoint(full, net);
  std::string bytes = full.str();
  SUBCASE("truncated") {
    std::istringstream in(bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(read_checkpoint(in), DataError);
  }
  SUBCASE("bad magic") {
    bytes[0] = 'X';
    std::istringstream in(bytes);
    CHECK_THROWS_AS(read_checkpoint(in), DataError);
  }
  SUBCASE("inconsistent layer shapes") {
    // W2 rows must equal emb_dim + W1 cols; corrupt W1 cols (second u32).
    bytes[8] = 9;
    std::istringstream in(bytes);
    CHECK_THROWS_AS(read_checkpoint(in), DataError);
  }
}

}  // TEST_SUITE
