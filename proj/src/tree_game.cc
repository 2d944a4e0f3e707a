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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pikl/rng.h"
#include "pikl/toy_games.h"

namespace pikl {
namespace {

std::uint64_t checked_leaf_count(std::size_t branching, std::size_t depth) {
  if (branching < 1 || depth < 1) {
    throw std::invalid_argument("tree games need branching >= 1, depth >= 1");
  }
  std::uint64_t leaves = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    leaves *= branching;
    if (leaves > kTreeLeafLimit) {
      throw SizeLimitError("tree game with branching " +
                           std::to_string(branching) + " and depth " +
                           std::to_string(depth) + " exceeds " +
                           std::to_string(kTreeLeafLimit) + " leaves");
    }
  }
  return leaves;
}

}  // namespace

TreeGame::TreeGame(std::size_t branching, std::size_t depth,
                   std::vector<double> leaf_rewards, std::uint64_t seed)
    : branching_(branching),
      depth_(depth),
      seed_(seed),
      leaves_(std::move(leaf_rewards)) {
  const std::uint64_t leaves = checked_leaf_count(branching, depth);
  if (leaves_.size() != leaves) {
    throw std::invalid_argument("expected " + std::to_string(leaves) +
                                " leaf rewards, got " +
                                std::to_string(leaves_.size()));
  }
  for (double r : leaves_) {
    if (!(r >= -1.0 && r <= 1.0)) {
      throw std::invalid_argument("leaf reward outside [-1, 1]");
    }
  }
  // (b^d - 1) / (b - 1) interior nodes, or d for a chain.
  num_interior_ = 0;
  std::size_t level = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    num_interior_ += level;
    level *= branching;
  }
}

std::size_t TreeGame::node_depth(std::size_t node) const {
  std::size_t depth = 0;
  while (node > 0) {
    node = (node - 1) / branching_;
    ++depth;
  }
  return depth;
}

std::vector<double> minimax_values(const TreeGame& game) {
  std::vector<double> value(game.num_nodes());
  for (std::size_t node = game.num_nodes(); node-- > 0;) {
    if (game.is_terminal(node)) {
      value[node] = game.terminal_reward(node);
      continue;
    }
    const bool maximize = game.player_to_move(node) == 0;
    double best = maximize ? -2.0 : 2.0;
    for (std::size_t a = 0; a < game.branching(); ++a) {
      const double v = value[game.child(node, a)];
      best = maximize ? std::max(best, v) : std::min(best, v);
    }
    value[node] = best;
  }
  return value;
}

std::size_t TreeInstance::best_move(std::size_t node) const {
  const double sign = game.player_to_move(node) == 0 ? 1.0 : -1.0;
  std::size_t best = 0;
  for (std::size_t a = 1; a < game.branching(); ++a) {
    if (sign * minimax[game.child(node, a)] >
        sign * minimax[game.child(node, best)]) {
      best = a;
    }
  }
  return best;
}

TreeInstance make_tree_instance(TreeGame game, std::uint64_t seed,
                                const TreeGameOptions& options) {
  TreeInstance inst{std::move(game), {}, {}, {}};
  const TreeGame& g = inst.game;
  inst.minimax = minimax_values(g);

  SyntheticAnchor& anchor = inst.anchor;
  anchor.concentration = options.concentration;
  anchor.noise_scale = options.anchor_noise;
  anchor.noise_seed = derive_seed(seed, 1);
  Rng anchor_rng(anchor.noise_seed);
  anchor.policies.reserve(g.num_interior());
  std::vector<double> logits(g.branching());
  for (std::size_t node = 0; node < g.num_interior(); ++node) {
    const double sign = g.player_to_move(node) == 0 ? 1.0 : -1.0;
    for (std::size_t a = 0; a < g.branching(); ++a) {
      logits[a] = anchor.concentration * sign * inst.minimax[g.child(node, a)] +
                  anchor.noise_scale * anchor_rng.normal();
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> weights(g.branching());
    for (std::size_t a = 0; a < g.branching(); ++a) {
      weights[a] = std::exp(logits[a] - top);
    }
    anchor.policies.push_back(Policy::normalized(std::move(weights)));
  }

  Rng value_rng(derive_seed(seed, 2));
  inst.model_value.resize(g.num_nodes());
  for (std::size_t node = 0; node < g.num_nodes(); ++node) {
    if (g.is_terminal(node)) {
      inst.model_value[node] = g.terminal_reward(node);
      continue;
    }
    const double noisy = inst.minimax[node] +
                         value_rng.uniform(-options.value_noise,
                                           options.value_noise);
    inst.model_value[node] = std::clamp(noisy, -1.0, 1.0);
  }
  return inst;
}

TreeInstance make_tree_game(std::size_t branching, std::size_t depth,
                            std::uint64_t seed, const TreeGameOptions& options) {
  const std::uint64_t leaves = checked_leaf_count(branching, depth);
  Rng rng(seed);
  std::vector<double> rewards(leaves);
  for (double& r : rewards) r = rng.uniform(-1.0, 1.0);
  return make_tree_instance(TreeGame(branching, depth, std::move(rewards), seed),
                            seed, options);
}

}  // namespace pikl
