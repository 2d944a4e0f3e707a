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

#ifndef PIKL_MCTS_H_
#define PIKL_MCTS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pikl/game.h"
#include "pikl/rng.h"
#include "pikl/toy_games.h"

namespace pikl {

// Value proxy for actions with no visits.
enum class FpuMode {
  // Equal-weighted mean Q of the visited siblings; the node's model value
  // when no sibling has been visited.
  kSiblingAverage,
  // Always the node's model value.
  kNodeValue,
};

struct SearchConfig {
  std::uint64_t iterations = 100;
  double c_puct = 1.0;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  FpuMode fpu = FpuMode::kSiblingAverage;
};

// Statistics are kept from the perspective of the player to move at the node.
struct MctsNode {
  std::size_t state = 0;
  int player = 0;
  bool terminal = false;
  // V(s) for the mover; the exact reward for terminal nodes.
  double model_value = 0.0;
  std::int32_t parent = -1;
  std::size_t parent_action = 0;
  std::vector<double> prior;
  std::vector<std::uint32_t> visits;
  std::vector<double> value_sum;
  std::vector<std::int32_t> children;  // -1 until expanded

  std::size_t num_actions() const { return prior.size(); }
  std::uint64_t total_visits() const;
  // W / N; NaN for unvisited actions.
  double q(std::size_t action) const;
  // Equal-weighted mean Q over visited actions; NaN if none.
  double visited_average() const;
  double fpu_value(FpuMode mode) const;
};

// argmax_a Q(a) + c_puct * prior(a) * sqrt(sum_b N(b)) / (N(a) + 1), with the
// FPU proxy standing in for unvisited Q. Ties go to the higher prior, then to
// the lower index.
std::size_t select_action(const MctsNode& node, double c_puct,
                          FpuMode fpu = FpuMode::kSiblingAverage);

// PUCT search over a TreeInstance using its synthetic anchor as the prior and
// its noisy value function at newly expanded nodes. The first iteration only
// expands the root; each later one descends to a new node (or a terminal),
// then backs the leaf value up the path.
class MctsTree {
 public:
  MctsTree(const TreeInstance& instance, std::size_t root_state);

  void run(const SearchConfig& config);
  void iterate(double c_puct, FpuMode fpu);

  const MctsNode& root() const { return nodes_.front(); }
  const std::vector<MctsNode>& nodes() const { return nodes_; }
  std::uint64_t iterations() const { return iterations_; }

 private:
  std::int32_t add_node(std::size_t state, std::int32_t parent,
                        std::size_t parent_action);

  const TreeInstance* instance_;
  std::vector<MctsNode> nodes_;
  std::uint64_t iterations_ = 0;
};

MctsTree run_search(const TreeInstance& instance, std::size_t root_state,
                    const SearchConfig& config);

// Empty string when every node satisfies the visit-count identity: the root's
// child visits sum to iterations - 1, and every other expanded interior
// node's child visits sum to (visits of its incoming edge) - 1. Otherwise a
// description of the first violation.
std::string visit_conservation_error(const MctsTree& tree);

// pi(a) ∝ N(a)^(1/T); T = 0 is the argmax with ties to the higher prior, then
// the lower index. Returns the prior when no action has been visited.
Policy visits_to_policy(const MctsNode& root, double temperature);

// c_puct * sqrt(sum n) / (k + sum n).
double grill_lambda(double c_puct, std::uint64_t total_visits, double k = 0.0);

// Smooth root policy: the reverse-KL regularized optimum over the root's Q
// values (unvisited actions take the mean of the visited ones), the root
// prior, and grill_lambda. Throws std::invalid_argument if no action has been
// visited.
Policy grill_policy(const MctsNode& root, double c_puct, double k = 0.0);

// Columns: action,N,Q,prior.
void write_root_stats_csv(std::ostream& out, const MctsNode& root);

struct AgentSpec {
  enum class Kind { kPrior, kMcts, kMinimax, kUniform };
  Kind kind = Kind::kPrior;
  double c_puct = 1.0;
  std::uint64_t iterations = 50;
  FpuMode fpu = FpuMode::kSiblingAverage;
};

// Picks a move at `node`. Prior and search agents sample their policy at
// `temperature` (0 = argmax); the minimax agent plays the exact best move.
std::size_t choose_move(const AgentSpec& agent, const TreeInstance& instance,
                        std::size_t node, double temperature, Rng& rng);

struct MatchResult {
  std::uint64_t games = 0;
  std::uint64_t wins = 0;
  std::uint64_t draws = 0;
  std::uint64_t losses = 0;
  // Mean score of agent A with draws worth one half.
  double score = 0.0;
  double std_error = 0.0;
};

// Game g is played on trees[(g / 2) % size] with agent A moving first when g
// is even, so every tree is played from both seats. Reproducible from `seed`.
MatchResult play_match(std::span<const TreeInstance> trees,
                       const AgentSpec& agent_a, const AgentSpec& agent_b,
                       std::uint64_t games, double temperature,
                       std::uint64_t seed);

}  // namespace pikl

#endif  // PIKL_MCTS_H_
