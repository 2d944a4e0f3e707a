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

#include "pikl/toy_games.h"

#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "pikl/rng.h"

namespace pikl {
namespace {

void append_allocations(int remaining, int field, std::vector<int>& current,
                        std::vector<std::vector<int>>& out) {
  const int fields = static_cast<int>(current.size());
  if (field == fields - 1) {
    current[field] = remaining;
    out.push_back(current);
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    current[field] = c;
    append_allocations(remaining - c, field + 1, current, out);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

}  // namespace

std::uint64_t blotto_allocation_count(int coins, int fields) {
  if (coins < 0 || fields < 1) return 0;
  // C(coins + fields - 1, fields - 1) by the multiplicative formula.
  const std::uint64_t k = static_cast<std::uint64_t>(fields - 1);
  const std::uint64_t n = static_cast<std::uint64_t>(coins) + k;
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(result);
}

std::vector<std::vector<int>> blotto_allocations(int coins, int fields) {
  if (coins < 1 || fields < 1) {
    throw std::invalid_argument("Blotto needs at least one coin and one field");
  }
  const std::uint64_t count = blotto_allocation_count(coins, fields);
  if (count > kBlottoActionLimit) {
    throw SizeLimitError("Blotto(" + std::to_string(coins) + "," +
                         std::to_string(fields) + ") has " +
                         std::to_string(count) + " actions per player, above " +
                         std::to_string(kBlottoActionLimit));
  }
  std::vector<std::vector<int>> out;
  out.reserve(count);
  std::vector<int> current(fields, 0);
  append_allocations(coins, 0, current, out);
  return out;
}

int blotto_outcome(const std::vector<int>& mine,
                   const std::vector<int>& theirs) {
  int won = 0;
  int lost = 0;
  for (std::size_t f = 0; f < mine.size(); ++f) {
    if (mine[f] > theirs[f]) ++won;
    if (mine[f] < theirs[f]) ++lost;
  }
  return (won > lost) - (won < lost);
}

NormalFormGame make_blotto(int coins, int fields) {
  auto actions = std::make_shared<const std::vector<std::vector<int>>>(
      blotto_allocations(coins, fields));
  std::vector<std::string> labels;
  labels.reserve(actions->size());
  for (const auto& a : *actions) {
    std::string label;
    for (std::size_t f = 0; f < a.size(); ++f) {
      if (f) label += '-';
      label += std::to_string(a[f]);
    }
    labels.push_back(std::move(label));
  }
  const std::size_t n = actions->size();
  UtilityFn utility = [actions](int player, std::span<const std::size_t> joint) {
    const int sign = player == 0 ? 1 : -1;
    return static_cast<double>(
        sign * blotto_outcome((*actions)[joint[0]], (*actions)[joint[1]]));
  };
  return NormalFormGame(
      "blotto(" + std::to_string(coins) + "," + std::to_string(fields) + ")",
      {n, n}, {{-1.0, 1.0}, {-1.0, 1.0}}, std::move(utility),
      /*zero_sum=*/true, {labels, labels});
}

NormalFormGame make_rps() {
  static constexpr double kPayoff[3][3] = {{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}};
  UtilityFn utility = [](int player, std::span<const std::size_t> joint) {
    const double u = kPayoff[joint[0]][joint[1]];
    return player == 0 ? u : -u;
  };
  const std::vector<std::string> labels = {"Rock", "Paper", "Scissors"};
  return NormalFormGame("rps", {3, 3}, {{-1.0, 1.0}, {-1.0, 1.0}},
                        std::move(utility), /*zero_sum=*/true,
                        {labels, labels});
}

NormalFormGame make_matching_pennies() {
  UtilityFn utility = [](int player, std::span<const std::size_t> joint) {
    const double u = joint[0] == joint[1] ? 1.0 : -1.0;
    return player == 0 ? u : -u;
  };
  const std::vector<std::string> labels = {"Heads", "Tails"};
  return NormalFormGame("pennies", {2, 2}, {{-1.0, 1.0}, {-1.0, 1.0}},
                        std::move(utility), /*zero_sum=*/true,
                        {labels, labels});
}

NormalFormGame make_random_zero_sum(std::size_t num_actions,
                                    std::uint64_t seed) {
  if (num_actions < 2 || num_actions > 100) {
    throw std::invalid_argument("random zero-sum games need 2..100 actions");
  }
  auto payoff = std::make_shared<std::vector<double>>(num_actions * num_actions);
  Rng rng(seed);
  for (double& u : *payoff) u = rng.uniform(-1.0, 1.0);
  UtilityFn utility = [payoff, num_actions](int player,
                                            std::span<const std::size_t> joint) {
    const double u = (*payoff)[joint[0] * num_actions + joint[1]];
    return player == 0 ? u : -u;
  };
  return NormalFormGame("random(" + std::to_string(num_actions) + ":" +
                            std::to_string(seed) + ")",
                        {num_actions, num_actions}, {{-1.0, 1.0}, {-1.0, 1.0}},
                        std::move(utility), /*zero_sum=*/true);
}

NormalFormGame make_game(const std::string& spec) {
  const std::vector<std::string> parts = split(spec, ':');
  if (parts.empty()) throw std::invalid_argument("empty game spec");
  try {
    if (parts[0] == "rps" && parts.size() == 1) return make_rps();
    if (parts[0] == "pennies" && parts.size() == 1) {
      return make_matching_pennies();
    }
    if (parts[0] == "blotto" && parts.size() == 3) {
      return make_blotto(std::stoi(parts[1]), std::stoi(parts[2]));
    }
    if (parts[0] == "blotto" && parts.size() == 2) {
      const auto cf = split(parts[1], ',');
      if (cf.size() == 2) return make_blotto(std::stoi(cf[0]), std::stoi(cf[1]));
    }
    if (parts[0] == "random" && parts.size() == 3) {
      return make_random_zero_sum(std::stoul(parts[1]), std::stoull(parts[2]));
    }
  } catch (const std::logic_error&) {
    // std::stoi and friends; fall through to the uniform message.
  }
  throw std::invalid_argument("unrecognized game spec '" + spec +
                              "' (expected rps, pennies, blotto:C:F or "
                              "random:N:SEED)");
}

nlohmann::json game_to_json(const NormalFormGame& game) {
  if (!game.has_dense_cache()) {
    throw SizeLimitError("game '" + game.name() +
                         "' is too large to dump as a payoff table");
  }
  nlohmann::json j;
  j["name"] = game.name();
  j["num_players"] = game.num_players();
  j["zero_sum"] = game.zero_sum();
  j["action_counts"] = game.action_counts();
  nlohmann::json actions = nlohmann::json::array();
  nlohmann::json bounds = nlohmann::json::array();
  for (int p = 0; p < game.num_players(); ++p) {
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t a = 0; a < game.num_actions(p); ++a) {
      labels.push_back(game.action_label(p, a));
    }
    actions.push_back(std::move(labels));
    bounds.push_back({game.bounds(p).lo, game.bounds(p).hi});
  }
  j["actions"] = std::move(actions);
  j["reward_bounds"] = std::move(bounds);
  nlohmann::json payoffs = nlohmann::json::array();
  JointAction joint(game.num_players());
  for (int p = 0; p < game.num_players(); ++p) {
    std::vector<double> row(game.num_joint_actions());
    for (std::uint64_t idx = 0; idx < game.num_joint_actions(); ++idx) {
      game.joint_from_index(idx, joint);
      row[idx] = game.utility(p, joint);
    }
    payoffs.push_back(std::move(row));
  }
  j["payoffs"] = std::move(payoffs);
  return j;
}

}  // namespace pikl
