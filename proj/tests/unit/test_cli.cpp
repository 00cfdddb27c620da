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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tweetsum::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path small_corpus(const std::string& name) {
  tweetsum::testing::SyntheticSpec spec;
  spec.events = 2;
  spec.days = 2;
  spec.tweets_per_day = 30;
  const fs::path dir = fresh_dir(name);
  tweetsum::testing::write_corpus(tweetsum::testing::make_corpus(spec), dir);
  return dir;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help exits 0 and usage errors exit 1 with a JSON line") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"summarize", "--help"}).code == 0);

  const Result none = run({});
  CHECK(none.code == 1);
  const Result bad = run({"frobnicate"});
  CHECK(bad.code == 1);
  const json line = json::parse(bad.err.substr(0, bad.err.find('\n')));
  CHECK(line["error"] == "usage");
  CHECK(line["exit_code"] == 1);

  const fs::path dir = small_corpus("tweetsum_cli_usage");
  const Result cap = run({"baseline", "--stream", (dir / "stream.jsonl").string(),
                          "--gold", (dir / "gold.jsonl").string(), "--out",
                          (dir / "b.json").string(), "--runs", "not-a-number"});
  CHECK(cap.code == 1);
}

TEST_CASE("malformed input exits 2") {
  const fs::path dir = small_corpus("tweetsum_cli_data");
  std::ofstream(dir / "broken.jsonl") << "{\"event\": \"e\", \"day\": 0\n";
  const Result r = run({"baseline", "--stream", (dir / "stream.jsonl").string(),
                        "--gold", (dir / "broken.jsonl").string(), "--out",
                        (dir / "b.json").string()});
  CHECK(r.code == 2);
  const json line = json::parse(r.err.substr(r.err.rfind('{')));
  CHECK(line["exit_code"] == 2);
}

TEST_CASE("evaluate scores a gold-identical summary at 1") {
  const fs::path dir = small_corpus("tweetsum_cli_eval");
  {
    std::ifstream gold(dir / "gold.jsonl");
    std::ofstream summary(dir / "perfect.jsonl");
    std::string line;
    std::uint64_t id = 1;
    while (std::getline(gold, line)) {
      const json g = json::parse(line);
      summary << json{{"event", g["event"]}, {"day", g["day"]}, {"id", id++},
                      {"salience", 1.0}, {"text", g["text"]}}
                     .dump()
              << '\n';
    }
  }
  const Result r = run({"evaluate", "--gold", (dir / "gold.jsonl").string(),
                        "--summary", "perfect=" + (dir / "perfect.jsonl").string(),
                        "--stream", (dir / "stream.jsonl").string(), "--word-vectors",
                        (dir / "vectors.txt").string(), "--out",
                        (dir / "report.json").string(), "--baseline-runs", "3"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const json report = read_json(dir / "report.json");
  const json& agg = report["systems"][0]["aggregates"];
  CHECK(agg["rouge1_f"]["micro"].get<double>() == doctest::Approx(1.0));
  CHECK(agg["rouge1_f"]["macro"].get<double>() == doctest::Approx(1.0));
  CHECK(agg["rouge2_f"]["micro"].get<double>() == doctest::Approx(1.0));
  CHECK(agg["cos_embed"]["micro"].get<double>() == doctest::Approx(1.0));
  CHECK(agg["events"] == 2);
  CHECK(report["baseline"]["runs"] == 3);
  CHECK(report["manifest"]["command"] == "evaluate");
}

TEST_CASE("options can come from a config file") {
  const fs::path dir = small_corpus("tweetsum_cli_config");
  std::ofstream(dir / "baseline.toml")
      << "[baseline]\nstream = \"" << (dir / "stream.jsonl").generic_string()
      << "\"\ngold = \"" << (dir / "gold.jsonl").generic_string()
      << "\"\nout = \"" << (dir / "from_config.json").generic_string()
      << "\"\nruns = 4\n";
  const Result r = run({"--config", (dir / "baseline.toml").string(), "baseline"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const json report = read_json(dir / "from_config.json");
  CHECK(report.dump().find("\"runs\":4") != std::string::npos);
}

}  // TEST_SUITE
