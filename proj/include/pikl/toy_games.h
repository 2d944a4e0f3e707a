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

#ifndef PIKL_TOY_GAMES_H_
#define PIKL_TOY_GAMES_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pikl/game.h"
#include <json.hpp>

namespace pikl {

// --- Normal-form fixtures -------------------------------------------------

inline constexpr std::uint64_t kBlottoActionLimit = 10'000;

// All ways of placing `coins` into `fields` ordered bins, in lexicographic
// order of the allocation vectors. Throws SizeLimitError above
// kBlottoActionLimit allocations.
std::vector<std::vector<int>> blotto_allocations(int coins, int fields);

// Number of allocations, C(coins + fields - 1, fields - 1), saturating.
std::uint64_t blotto_allocation_count(int coins, int fields);

// +1 / -1 / 0 for player 0 by comparing fields won (strictly more coins)
// against fields lost.
int blotto_outcome(const std::vector<int>& mine, const std::vector<int>& theirs);

// Symmetric two-player zero-sum Colonel Blotto with rewards in [-1, 1].
NormalFormGame make_blotto(int coins, int fields);

// Rewards in {-1, 0, +1}; action order (Rock, Paper, Scissors).
NormalFormGame make_rps();
// Action order (Heads, Tails); player 0 wins on a match.
NormalFormGame make_matching_pennies();

// n x n zero-sum game with player-0 payoffs i.i.d. uniform in [-1, 1].
NormalFormGame make_random_zero_sum(std::size_t num_actions,
                                    std::uint64_t seed);

// Builds a game from a spec string: "rps", "pennies", "blotto:C:F"
// (or "blotto:C,F"), "random:N:SEED".
NormalFormGame make_game(const std::string& spec);

// Actions, bounds, and the full payoff table (player-major, then joint index
// with player 0 most significant). Requires a dense-cacheable game.
nlohmann::json game_to_json(const NormalFormGame& game);

// --- Perfect-information tree games ---------------------------------------

inline constexpr std::uint64_t kTreeLeafLimit = 100'000;

// Complete alternating-move tree with uniform branching. Nodes are numbered
// breadth-first: the root is 0 and child `a` of node s is s * branching + 1 + a.
// Player 0 moves at even depths and maximizes the leaf reward.
class TreeGame {
 public:
  // Leaf rewards (player 0's) listed left to right; there must be
  // branching^depth of them, each in [-1, 1].
  TreeGame(std::size_t branching, std::size_t depth,
           std::vector<double> leaf_rewards, std::uint64_t seed = 0);

  std::size_t branching() const { return branching_; }
  std::size_t depth() const { return depth_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t num_nodes() const { return num_interior_ + leaves_.size(); }
  std::size_t num_interior() const { return num_interior_; }
  std::size_t num_leaves() const { return leaves_.size(); }

  bool is_terminal(std::size_t node) const { return node >= num_interior_; }
  std::size_t child(std::size_t node, std::size_t action) const {
    return node * branching_ + 1 + action;
  }
  std::size_t node_depth(std::size_t node) const;
  int player_to_move(std::size_t node) const {
    return static_cast<int>(node_depth(node) % 2);
  }
  // Player 0's reward at a terminal node.
  double terminal_reward(std::size_t node) const {
    return leaves_[node - num_interior_];
  }
  const std::vector<double>& leaf_rewards() const { return leaves_; }

 private:
  std::size_t branching_;
  std::size_t depth_;
  std::uint64_t seed_;
  std::size_t num_interior_;
  std::vector<double> leaves_;
};

// Exact minimax value of every node from player 0's perspective, by backward
// induction.
std::vector<double> minimax_values(const TreeGame& game);

// Imperfect prior over each interior node: softmax of the mover's child
// minimax values scaled by `concentration`, plus Gaussian log-space noise.
struct SyntheticAnchor {
  double concentration = 2.0;
  double noise_scale = 1.0;
  std::uint64_t noise_seed = 0;
  std::vector<Policy> policies;  // indexed by interior node

  const Policy& at(std::size_t node) const { return policies.at(node); }
};

struct TreeGameOptions {
  double value_noise = 0.2;    // sigma_V
  double concentration = 2.0;
  double anchor_noise = 1.0;
};

// A tree game together with its search model (anchor and noisy value
// function) and the exact minimax ground truth.
struct TreeInstance {
  TreeGame game;
  SyntheticAnchor anchor;
  // Model estimate of player 0's value at every node; exact at terminals,
  // minimax plus uniform noise in [-sigma_V, sigma_V] clamped to [-1, 1]
  // elsewhere.
  std::vector<double> model_value;
  std::vector<double> minimax;

  // Mover-optimal action by exact minimax; ties go to the lowest index.
  std::size_t best_move(std::size_t node) const;
};

// Leaves are i.i.d. uniform in [-1, 1] from `seed`. Throws SizeLimitError
// when branching^depth exceeds kTreeLeafLimit.
TreeInstance make_tree_game(std::size_t branching, std::size_t depth,
                            std::uint64_t seed, const TreeGameOptions& options = {});

// Wraps an explicit tree with a model derived from `seed`.
TreeInstance make_tree_instance(TreeGame game, std::uint64_t seed,
                                const TreeGameOptions& options = {});

}  // namespace pikl

#endif  // PIKL_TOY_GAMES_H_
