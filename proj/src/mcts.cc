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

#include "pikl/mcts.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "pikl/anchored.h"

namespace pikl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Argmax of `values` with ties to the higher prior, then the lower index.
std::size_t argmax_with_prior(std::span<const double> values,
                              std::span<const double> prior) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < values.size(); ++a) {
    if (values[a] > values[best] ||
        (values[a] == values[best] && prior[a] > prior[best])) {
      best = a;
    }
  }
  return best;
}

Policy tempered(std::span<const double> probs, double temperature) {
  if (temperature == 0.0) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < probs.size(); ++a) {
      if (probs[a] > probs[best]) best = a;
    }
    return Policy::pure(probs.size(), best);
  }
  double top = 0.0;
  for (double p : probs) top = std::max(top, p);
  std::vector<double> weights(probs.size());
  for (std::size_t a = 0; a < probs.size(); ++a) {
    weights[a] = probs[a] > 0.0
                     ? std::exp((std::log(probs[a]) - std::log(top)) / temperature)
                     : 0.0;
  }
  return Policy::normalized(std::move(weights));
}

}  // namespace

std::uint64_t MctsNode::total_visits() const {
  std::uint64_t total = 0;
  for (std::uint32_t n : visits) total += n;
  return total;
}

double MctsNode::q(std::size_t action) const {
  return visits[action] > 0 ? value_sum[action] / visits[action] : kNaN;
}

double MctsNode::visited_average() const {
  double total = 0.0;
  int count = 0;
  for (std::size_t a = 0; a < num_actions(); ++a) {
    if (visits[a] > 0) {
      total += q(a);
      ++count;
    }
  }
  return count > 0 ? total / count : kNaN;
}

double MctsNode::fpu_value(FpuMode mode) const {
  if (mode == FpuMode::kSiblingAverage) {
    const double avg = visited_average();
    if (!std::isnan(avg)) return avg;
  }
  return model_value;
}

std::size_t select_action(const MctsNode& node, double c_puct, FpuMode fpu) {
  if (node.num_actions() == 0) {
    throw std::invalid_argument("select_action on a node without actions");
  }
  const double sqrt_total = std::sqrt(static_cast<double>(node.total_visits()));
  const double fpu_q = node.fpu_value(fpu);
  std::vector<double> scores(node.num_actions());
  for (std::size_t a = 0; a < node.num_actions(); ++a) {
    const double q = node.visits[a] > 0 ? node.q(a) : fpu_q;
    scores[a] = q + c_puct * node.prior[a] * sqrt_total / (node.visits[a] + 1.0);
  }
  return argmax_with_prior(scores, node.prior);
}

MctsTree::MctsTree(const TreeInstance& instance, std::size_t root_state)
    : instance_(&instance) {
  if (root_state >= instance.game.num_nodes()) {
    throw std::out_of_range("root state outside the tree");
  }
  if (instance.game.is_terminal(root_state)) {
    throw std::invalid_argument("cannot search from a terminal state");
  }
  nodes_.reserve(256);
  add_node(root_state, -1, 0);
}

std::int32_t MctsTree::add_node(std::size_t state, std::int32_t parent,
                                std::size_t parent_action) {
  const TreeGame& g = instance_->game;
  MctsNode node;
  node.state = state;
  node.player = g.player_to_move(state);
  node.terminal = g.is_terminal(state);
  node.parent = parent;
  node.parent_action = parent_action;
  const double sign = node.player == 0 ? 1.0 : -1.0;
  node.model_value = sign * instance_->model_value[state];
  if (!node.terminal) {
    const Policy& prior = instance_->anchor.at(state);
    node.prior.assign(prior.probs().begin(), prior.probs().end());
    node.visits.assign(g.branching(), 0);
    node.value_sum.assign(g.branching(), 0.0);
    node.children.assign(g.branching(), -1);
  }
  nodes_.push_back(std::move(node));
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

void MctsTree::run(const SearchConfig& config) {
  if (config.iterations < 1) throw std::invalid_argument("N must be >= 1");
  for (std::uint64_t i = 0; i < config.iterations; ++i) {
    iterate(config.c_puct, config.fpu);
  }
}

void MctsTree::iterate(double c_puct, FpuMode fpu) {
  ++iterations_;
  // The root was evaluated at construction; the first iteration is its
  // expansion.
  if (iterations_ == 1) return;

  const TreeGame& g = instance_->game;
  std::vector<std::pair<std::int32_t, std::size_t>> path;
  std::int32_t current = 0;
  double leaf_value = 0.0;  // player 0's perspective
  while (true) {
    const std::size_t a = select_action(nodes_[current], c_puct, fpu);
    path.emplace_back(current, a);
    std::int32_t child = nodes_[current].children[a];
    if (child < 0) {
      const std::size_t state = g.child(nodes_[current].state, a);
      child = add_node(state, current, a);
      nodes_[current].children[a] = child;
      leaf_value = instance_->model_value[state];
      break;
    }
    if (nodes_[child].terminal) {
      leaf_value = g.terminal_reward(nodes_[child].state);
      break;
    }
    current = child;
  }
  for (const auto& [index, action] : path) {
    MctsNode& node = nodes_[index];
    node.visits[action] += 1;
    node.value_sum[action] += node.player == 0 ? leaf_value : -leaf_value;
  }
}

MctsTree run_search(const TreeInstance& instance, std::size_t root_state,
                    const SearchConfig& config) {
  MctsTree tree(instance, root_state);
  tree.run(config);
  return tree;
}

std::string visit_conservation_error(const MctsTree& tree) {
  const auto& nodes = tree.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const MctsNode& node = nodes[i];
    if (node.terminal) continue;
    std::uint64_t passes = 0;
    if (node.parent < 0) {
      passes = tree.iterations();
    } else {
      passes = nodes[node.parent].visits[node.parent_action];
    }
    if (node.total_visits() + 1 != passes) {
      return "node " + std::to_string(i) + " (state " +
             std::to_string(node.state) + "): child visits " +
             std::to_string(node.total_visits()) + ", passes " +
             std::to_string(passes);
    }
  }
  return {};
}

Policy visits_to_policy(const MctsNode& root, double temperature) {
  if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
  if (root.total_visits() == 0) return Policy(root.prior);
  std::vector<double> counts(root.visits.begin(), root.visits.end());
  if (temperature == 0.0) {
    return Policy::pure(counts.size(), argmax_with_prior(counts, root.prior));
  }
  if (temperature == 1.0) return Policy::normalized(std::move(counts));
  return tempered(Policy::normalized(counts).probs(), temperature);
}

double grill_lambda(double c_puct, std::uint64_t total_visits, double k) {
  const double n = static_cast<double>(total_visits);
  return c_puct * std::sqrt(n) / (k + n);
}

Policy grill_policy(const MctsNode& root, double c_puct, double k) {
  const double fill = root.visited_average();
  if (std::isnan(fill)) {
    throw std::invalid_argument(
        "grill_policy needs at least one visited action; fall back to the "
        "prior");
  }
  std::vector<double> q(root.num_actions());
  for (std::size_t a = 0; a < q.size(); ++a) {
    q[a] = root.visits[a] > 0 ? root.q(a) : fill;
  }
  return reverse_kl_opt(q, Policy(root.prior),
                        grill_lambda(c_puct, root.total_visits(), k))
      .policy;
}

void write_root_stats_csv(std::ostream& out, const MctsNode& root) {
  const auto old_precision = out.precision(9);
  out << "action,N,Q,prior\n";
  for (std::size_t a = 0; a < root.num_actions(); ++a) {
    out << a << ',' << root.visits[a] << ',' << root.q(a) << ',' << root.prior[a]
        << '\n';
  }
  out.precision(old_precision);
}

std::size_t choose_move(const AgentSpec& agent, const TreeInstance& instance,
                        std::size_t node, double temperature, Rng& rng) {
  const std::size_t b = instance.game.branching();
  switch (agent.kind) {
    case AgentSpec::Kind::kMinimax:
      return instance.best_move(node);
    case AgentSpec::Kind::kUniform:
      return std::min(static_cast<std::size_t>(rng.uniform() * b), b - 1);
    case AgentSpec::Kind::kPrior: {
      const Policy pi = tempered(instance.anchor.at(node).probs(), temperature);
      return rng.categorical(pi.probs());
    }
    case AgentSpec::Kind::kMcts: {
      SearchConfig config;
      config.iterations = agent.iterations;
      config.c_puct = agent.c_puct;
      config.fpu = agent.fpu;
      const MctsTree tree = run_search(instance, node, config);
      const Policy pi = visits_to_policy(tree.root(), temperature);
      return rng.categorical(pi.probs());
    }
  }
  throw std::invalid_argument("unknown agent kind");
}

MatchResult play_match(std::span<const TreeInstance> trees,
                       const AgentSpec& agent_a, const AgentSpec& agent_b,
                       std::uint64_t games, double temperature,
                       std::uint64_t seed) {
  if (trees.empty()) throw std::invalid_argument("no trees to play on");
  MatchResult result;
  result.games = games;
  double total = 0.0;
  double total_sq = 0.0;
  for (std::uint64_t g = 0; g < games; ++g) {
    const TreeInstance& inst = trees[(g / 2) % trees.size()];
    const bool a_first = g % 2 == 0;
    Rng rng(derive_seed(seed, g));
    std::size_t node = 0;
    while (!inst.game.is_terminal(node)) {
      const bool a_to_move = (inst.game.player_to_move(node) == 0) == a_first;
      const AgentSpec& agent = a_to_move ? agent_a : agent_b;
      node = inst.game.child(node, choose_move(agent, inst, node, temperature, rng));
    }
    const double reward = inst.game.terminal_reward(node) * (a_first ? 1.0 : -1.0);
    double score = 0.5;
    if (reward > 0.0) {
      score = 1.0;
      ++result.wins;
    } else if (reward < 0.0) {
      score = 0.0;
      ++result.losses;
    } else {
      ++result.draws;
    }
    total += score;
    total_sq += score * score;
  }
  if (games > 0) {
    const double n = static_cast<double>(games);
    result.score = total / n;
    const double var = std::max(total_sq / n - result.score * result.score, 0.0);
    result.std_error = games > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  }
  return result;
}

}  // namespace pikl
