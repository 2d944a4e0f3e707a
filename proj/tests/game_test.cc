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
#include <vector>

#include "oracles.h"
#include "pikl/game.h"
#include "pikl/rng.h"
#include "pikl/toy_games.h"

namespace pikl {
namespace {

constexpr std::size_t kRock = 0, kPaper = 1, kScissors = 2;

TEST_CASE("Policy validates its entries") {
  CHECK_NOTHROW(Policy({0.25, 0.75}));
  CHECK_THROWS_AS(Policy({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Policy({1.5, -0.5}), std::invalid_argument);
  CHECK(Policy::uniform(4)[3] == 0.25);
  CHECK(Policy::pure(3, 1)[1] == 1.0);
  CHECK(Policy::normalized({1, 3})[1] == 0.75);
  CHECK(Policy::pure(3, 1).min_prob() == 0.0);
  CHECK_FALSE(Policy::pure(3, 1).full_support());
}

TEST_CASE("expected utility examples") {
  const NormalFormGame pennies = make_matching_pennies();
  const Profile uniform2 = {Policy::uniform(2), Policy::uniform(2)};
  CHECK(expected_utility(pennies, uniform2, 0) == 0.0);

  const NormalFormGame rps = make_rps();
  const Profile paper_vs_rock = {Policy::pure(3, kPaper), Policy::pure(3, kRock)};
  CHECK(expected_utility(rps, paper_vs_rock, 0) == 1.0);

  const NormalFormGame blotto = make_blotto(10, 3);
  const Profile uniform66 = {Policy::uniform(66), Policy::uniform(66)};
  CHECK(expected_utility(blotto, uniform66, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("best response examples") {
  const NormalFormGame rps = make_rps();
  const auto vs_rock = best_response(rps, {Policy::uniform(3), Policy::pure(3, kRock)}, 0);
  CHECK(vs_rock.action == kPaper);
  CHECK(vs_rock.value == 1.0);

  const NormalFormGame pennies = make_matching_pennies();
  const auto tie = best_response(pennies, {Policy::uniform(2), Policy::uniform(2)}, 0);
  CHECK(tie.action == 0);
  CHECK(tie.value == 0.0);

  // Against (R, P) half and half: R scores -0.5, P scores +0.5, S scores 0.
  const Profile mixed = {Policy::uniform(3), Policy({0.5, 0.5, 0.0})};
  std::vector<double> values;
  for (std::size_t a = 0; a < 3; ++a) {
    values.push_back(expected_utility(rps, {Policy::pure(3, a), mixed[1]}, 0));
  }
  CHECK(values == std::vector<double>{-0.5, 0.5, 0.0});
  const auto br = best_response(rps, mixed, 0);
  CHECK(br.action == kPaper);
  CHECK(br.value == 0.5);
}

TEST_CASE("exploitability examples") {
  const NormalFormGame pennies = make_matching_pennies();
  const auto eq = exploitability(pennies, {Policy::uniform(2), Policy::uniform(2)});
  CHECK(eq.gaps == std::vector<double>{0.0, 0.0});

  const NormalFormGame rps = make_rps();
  const auto rock = exploitability(rps, {Policy::pure(3, kRock), Policy::uniform(3)});
  CHECK(rock.gaps[1] == doctest::Approx(1.0));

  const NormalFormGame blotto = make_blotto(10, 3);
  const Profile uniform = {Policy::uniform(66), Policy::uniform(66)};
  const auto gaps = exploitability(blotto, uniform).gaps;
  const auto oracle_gaps = oracle::brute_force_gaps(blotto, uniform);
  CHECK(gaps[0] == doctest::Approx(oracle_gaps[0]).epsilon(1e-12));
  CHECK(gaps[1] == doctest::Approx(oracle_gaps[1]).epsilon(1e-12));
  CHECK(gaps[0] == doctest::Approx(gaps[1]).epsilon(1e-12));
  CHECK(gaps[0] > 0.0);
}

TEST_CASE("exploitability agrees with the enumeration oracle on random profiles") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rep % 9;
    const NormalFormGame game = make_random_zero_sum(n, 100 + rep);
    const Profile profile = {Policy::normalized(oracle::random_full_support(n, rng)),
                             Policy::normalized(oracle::random_full_support(n, rng))};
    const auto gaps = exploitability(game, profile).gaps;
    const auto expected = oracle::brute_force_gaps(game, profile);
    for (int p = 0; p < 2; ++p) {
      CHECK(std::abs(gaps[p] - expected[p]) <= 1e-12);
      CHECK(gaps[p] >= -1e-9);
    }
    // Zero-sum: the gaps add up to a nonnegative duality gap.
    CHECK(gaps[0] + gaps[1] >= -1e-9);
  }
}

TEST_CASE("Nash profiles have zero total gap") {
  const auto rps = exploitability(make_rps(), {Policy::uniform(3), Policy::uniform(3)});
  CHECK(std::abs(rps.total) <= 1e-9);
  const auto off = exploitability(make_rps(), {Policy({0.4, 0.3, 0.3}), Policy::uniform(3)});
  CHECK(off.total > 1e-9);
}

TEST_CASE("expected utility is multilinear") {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rep % 6;
    const NormalFormGame game = make_random_zero_sum(n, 500 + rep);
    const Policy p = Policy::normalized(oracle::random_full_support(n, rng));
    const Policy p2 = Policy::normalized(oracle::random_full_support(n, rng));
    const Policy other = Policy::normalized(oracle::random_full_support(n, rng));
    for (double alpha : {0.0, 0.3, 1.0}) {
      std::vector<double> mix(n);
      for (std::size_t a = 0; a < n; ++a) mix[a] = alpha * p[a] + (1 - alpha) * p2[a];
      for (int player = 0; player < 2; ++player) {
        const double lhs = expected_utility(game, {Policy::normalized(mix), other}, player);
        const double rhs = alpha * expected_utility(game, {p, other}, player) +
                           (1 - alpha) * expected_utility(game, {p2, other}, player);
        CHECK(std::abs(lhs - rhs) <= 1e-9);
      }
    }
  }
}

TEST_CASE("three-player games use the general evaluator") {
  // Player 0 wins 1 if all three actions agree, split evenly as a loss.
  const NormalFormGame game(
      "agree3", {2, 2, 2}, {{-1, 1}, {-1, 1}, {-1, 1}},
      [](int player, std::span<const std::size_t> j) {
        const bool agree = j[0] == j[1] && j[1] == j[2];
        if (player == 0) return agree ? 1.0 : -1.0;
        return agree ? -0.5 : 0.5;
      },
      true);
  CHECK_NOTHROW(game.validate());
  const Profile uniform = {Policy::uniform(2), Policy::uniform(2), Policy::uniform(2)};
  CHECK(expected_utility(game, uniform, 0) == doctest::Approx(-0.5));
  const auto gaps = exploitability(game, uniform).gaps;
  const auto expected = oracle::brute_force_gaps(game, uniform);
  for (int p = 0; p < 3; ++p) CHECK(gaps[p] == doctest::Approx(expected[p]));
}

TEST_CASE("validate catches broken invariants") {
  const NormalFormGame out_of_bounds(
      "loud", {2, 2}, {{-1, 1}, {-1, 1}},
      [](int player, std::span<const std::size_t>) { return player == 0 ? 2.0 : -2.0; },
      true);
  CHECK_THROWS_AS(out_of_bounds.validate(), std::logic_error);
  const NormalFormGame not_zero_sum(
      "skew", {2, 2}, {{-1, 1}, {-1, 1}},
      [](int, std::span<const std::size_t>) { return 0.5; }, true);
  CHECK_THROWS_AS(not_zero_sum.validate(), std::logic_error);
}

TEST_CASE("oversized games ask for sampled mode") {
  const NormalFormGame huge(
      "huge", {5000, 5000}, {{-1, 1}, {-1, 1}},
      [](int, std::span<const std::size_t>) { return 0.0; }, true);
  CHECK_FALSE(huge.has_dense_cache());
  const Profile uniform = {Policy::uniform(5000), Policy::uniform(5000)};
  try {
    expected_utility(huge, uniform, 0);
    FAIL("expected SizeLimitError");
  } catch (const SizeLimitError& e) {
    CHECK(std::string(e.what()).find("sampled mode") != std::string::npos);
  }
}

TEST_CASE("kl divergence examples") {
  const Policy p({0.2, 0.3, 0.5});
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(Policy({1.0, 0.0}), Policy({0.5, 0.5})) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  try {
    kl_divergence(Policy({0.5, 0.5}), Policy({1.0, 0.0}));
    FAIL("expected SupportError");
  } catch (const SupportError& e) {
    CHECK(e.action() == 1);
  }
}

TEST_CASE("Gibbs inequality on random pairs") {
  Rng rng(3);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rep % 7;
    const auto p = oracle::random_full_support(n, rng);
    const auto q = oracle::random_full_support(n, rng);
    CHECK(kl_divergence(p, q) >= -1e-12);
    CHECK(std::abs(kl_divergence(p, p)) <= 1e-12);
  }
}

TEST_CASE("max log inverse") {
  CHECK(max_log_inverse(Policy::uniform(10)) == doctest::Approx(std::log(10.0)));
  CHECK(max_log_inverse(Policy({0.9, 0.1})) == doctest::Approx(std::log(10.0)));
}

TEST_CASE("profile shape is checked") {
  const NormalFormGame rps = make_rps();
  CHECK_THROWS_AS(check_profile(rps, {Policy::uniform(3)}), std::invalid_argument);
  CHECK_THROWS_AS(check_profile(rps, {Policy::uniform(3), Policy::uniform(2)}),
                  std::invalid_argument);
}

TEST_CASE("joint index round trip") {
  const NormalFormGame game(
      "shape", {2, 3, 4}, {{-1, 1}, {-1, 1}, {-1, 1}},
      [](int, std::span<const std::size_t>) { return 0.0; }, true);
  std::vector<std::size_t> joint(3);
  for (std::uint64_t i = 0; i < game.num_joint_actions(); ++i) {
    game.joint_from_index(i, joint);
    CHECK(game.joint_index(joint) == i);
  }
}

}  // namespace
}  // namespace pikl
