// Copyright 2026 The pikl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pikl/harness.h"

namespace pikl {
namespace {

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

std::string sweep_csv(const ExperimentConfig& c, int jobs) {
  std::ostringstream out;
  write_sweep_csv(out, blotto_sweep(c, jobs), c.hash());
  return out.str();
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config_string(
      "# small sweep\n"
      "experiment = blotto-sweep\n"
      "game = blotto:4:2\n"
      "lambda = 0.1, 1\n"
      "T = 1e3\n"
      "seeds = 1..3, 7\n"
      "eta = adaptive\n"
      "mode = exact   # inline comment\n"
      "baselines = rm\n");
  CHECK(c.kind == ExperimentKind::kBlottoSweep);
  CHECK(c.games == std::vector<std::string>{"blotto:4:2"});
  CHECK(c.lambdas == std::vector<double>{0.1, 1.0});
  CHECK(c.T == 1000);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3, 7});
  CHECK(c.eta.mode == EtaSpec::Mode::kAdaptive);
  CHECK(c.eta.value == doctest::Approx(10.0 / 3.0));
  CHECK(c.mode == UpdateMode::kExact);
  CHECK(c.baselines == std::vector<SolverKind>{SolverKind::kRegretMatching});
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config_string("experiment = blotto-sweep\nlamda = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("game = rps\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = nope\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = qre-check\nseeds = 1, 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = qre-check\nlambda = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = qre-check\nlambda = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = qre-check\nT = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = qre-check\nT = 1\nT = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = qre-check\nmode = sampled\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = verify-bounds\ngame = chess\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = mcts-eval\nc_puct = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = mcts-eval\nbranching = 10\ndepth = 6\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = blotto-sweep\nno equals sign\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_string("experiment = mcts-eval\n", ExperimentKind::kQreCheck),
                  ConfigError);
  CHECK_NOTHROW(parse_config_string("T = 5\n", ExperimentKind::kQreCheck));
}

TEST_CASE("config hash") {
  const auto a = parse_config_string("experiment = qre-check\nT = 100\n");
  const auto b = parse_config_string("experiment = qre-check\nT = 100\noutput = x.csv\n");
  const auto c = parse_config_string("experiment = qre-check\nT = 101\n");
  // Spelling out a default changes nothing.
  const auto d =
      parse_config_string("experiment = qre-check\nT = 100\nlambda = 0.3, 1\n");
  CHECK(a.hash().size() == 16);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash() == d.hash());
}

TEST_CASE("random game ranges expand") {
  const auto c = parse_config_string("experiment = verify-bounds\ngame = random:5:3..5, rps\n");
  CHECK(c.games == std::vector<std::string>{"random:5:3", "random:5:4", "random:5:5", "rps"});
}

TEST_CASE("anchor specs") {
  const auto c = parse_config_string(
      "experiment = qre-check\ngame = pennies\nanchor = 0.9 0.1 / 0.5 0.5\n");
  const Profile anchors = make_anchors(c.anchor, make_game("pennies"), 1);
  CHECK(anchors[0] == Policy({0.9, 0.1}));
  CHECK(anchors[1] == Policy({0.5, 0.5}));
  AnchorSpec random;
  random.kind = AnchorSpec::Kind::kRandom;
  const NormalFormGame rps = make_game("rps");
  CHECK(make_anchors(random, rps, 4)[0] == make_anchors(random, rps, 4)[0]);
  CHECK(make_anchors(random, rps, 4)[0] != make_anchors(random, rps, 5)[0]);
  CHECK(make_anchors(random, rps, 4)[0].full_support());
  CHECK_THROWS_AS(make_anchors(c.anchor, rps, 1), ConfigError);
}

TEST_CASE("float formatting") {
  CHECK(format_float(0.1) == "0.1");
  CHECK(format_float(1.0 / 3.0) == "0.333333333");
  CHECK(format_float(1e-7) == "1e-07");
  CHECK(format_float(std::nan("")) == "nan");
}

TEST_CASE("blotto sweep output") {
  auto c = parse_config_string(
      "experiment = blotto-sweep\ngame = blotto:5:3\nlambda = 10, 0.01\nT = 200\n"
      "seeds = 2, 1\n");
  const std::string csv = sweep_csv(c, 1);
  CHECK(first_line(csv) == "lambda,seed,T,kl_to_anchor,exploitability,regret,solver,config_hash");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::vector<std::string> keys;
  while (std::getline(lines, line)) {
    keys.push_back(line.substr(0, line.find(",", line.find(",") + 1)));
    CHECK(line.ends_with("," + c.hash()));
  }
  // piKL rows sorted by lambda then seed, then the baselines.
  CHECK(keys == std::vector<std::string>{"0.01,1", "0.01,2", "10,1", "10,2", "0,1", "0,2",
                                         "0,1", "0,2"});
  CHECK(sweep_csv(c, 1) == csv);
  CHECK(sweep_csv(c, 3) == csv);
}

TEST_CASE("blotto sweep tradeoff at small scale") {
  auto c = parse_config_string(
      "experiment = blotto-sweep\ngame = blotto:6:3\nlambda = 0.01, 10\nT = 3000\n"
      "seeds = 1\nmode = exact\nbaselines = none\n");
  const auto rows = blotto_sweep(c);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].kl_to_anchor < rows[0].kl_to_anchor);
  CHECK(rows[1].exploitability >= rows[0].exploitability - 1e-6);
}

TEST_CASE("verify-bounds rows") {
  auto c = parse_config_string(
      "experiment = verify-bounds\ngame = pennies, random:4:1\nlambda = 0.1, 1\nT = 512\n"
      "seeds = 1\nanchor = uniform\n");
  const auto rows = verify_bounds(c, 2);
  // 2 games x 2 lambdas x 10 checkpoints x 2 players.
  CHECK(rows.size() == 2 * 2 * 10 * 2);
  CHECK(all_kl_bounds_pass(rows));
  for (const auto& r : rows) {
    CHECK(r.eta_ok);
    CHECK(r.gap_applicable);
    CHECK(r.beta == doctest::Approx(r.game == "pennies" ? std::log(2.0) : std::log(4.0)));
    CHECK(r.slack == doctest::Approx(5.0 * 2.0 / std::sqrt(static_cast<double>(r.T))));
  }
  std::ostringstream csv, json;
  write_bounds_csv(csv, rows, c.hash());
  write_bounds_json(json, rows, c.hash());
  CHECK(first_line(csv.str()).starts_with("game,lambda,seed,T,player,kl_avg,kl_bound,kl_pass"));
  const auto doc = nlohmann::json::parse(json.str());
  CHECK(doc["rows"].size() == rows.size());
  CHECK(doc["all_kl_bounds_pass"] == true);
  CHECK(doc["config_hash"] == c.hash());
}

TEST_CASE("dominant lambda keeps the average on the anchor") {
  auto c = parse_config_string(
      "experiment = verify-bounds\ngame = random:10:1\nlambda = 1e6\nT = 1000\nseeds = 1\n"
      "anchor = uniform\n");
  const auto rows = verify_bounds(c);
  for (const auto& r : rows) {
    CHECK(r.kl_pass);
    CHECK(r.gap_pass);
    if (r.T == 1000) CHECK(r.kl_avg <= 1e-3);
  }
}

TEST_CASE("qre-check rows") {
  auto c = parse_config_string(
      "experiment = qre-check\ngame = rps\nlambda = 0.5\nT = 1000\nseeds = 1\n"
      "anchor = uniform\n");
  const QreReport report = qre_check(c);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.skipped.empty());
  for (const auto& r : report.rows) CHECK(r.linf_gap <= 0.02);

  auto dominant = parse_config_string(
      "experiment = qre-check\ngame = pennies\nlambda = 1e6\nT = 100000\nseeds = 1\n"
      "anchor = 0.9 0.1 / 0.5 0.5\n");
  for (const auto& r : qre_check(dominant).rows) CHECK(r.linf_gap <= 1e-3);

  auto starved = parse_config_string(
      "experiment = qre-check\ngame = pennies\nlambda = 0.05\nT = 10\nseeds = 1\n"
      "anchor = 0.9 0.1 / 0.3 0.7\nqre_max_iters = 2\n");
  const QreReport skipped = qre_check(starved);
  CHECK(skipped.rows.empty());
  CHECK(skipped.skipped.size() == 1);
}

TEST_CASE("mcts-eval rows") {
  auto c = parse_config_string(
      "experiment = mcts-eval\nc_puct = 1e4, 1e-6, 1\ntrees = 20\nmatch_games = 40\n"
      "iterations = 30\nseeds = 1\n");
  const auto rows = mcts_eval(c, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].c_puct == 1e-6);
  CHECK(rows[2].c_puct == 1e4);
  CHECK(rows[2].agreement_anchor >= 0.95);
  std::ostringstream a, b;
  write_mcts_eval_csv(a, rows, c.hash());
  write_mcts_eval_csv(b, mcts_eval(c, 1), c.hash());
  CHECK(a.str() == b.str());
  CHECK(first_line(a.str()) ==
        "c_puct,top1_agreement_with_anchor_argmax,top1_agreement_with_minimax,"
        "winrate_vs_prior,stderr,prior_top1_agreement_with_minimax,seed,config_hash");
}

TEST_CASE("run_experiment reports unwritable outputs") {
  auto c = parse_config_string(
      "experiment = qre-check\ngame = rps\nlambda = 0.5\nT = 10\nseeds = 1\n");
  CHECK(run_experiment(c, "/nonexistent-dir/out.csv", 1) == 2);
}

}  // namespace
}  // namespace pikl
