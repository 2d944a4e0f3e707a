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

#ifndef PIKL_GAME_H_
#define PIKL_GAME_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pikl {

// Joint-action spaces above this size are refused by the exact evaluators.
inline constexpr std::uint64_t kExactJointLimit = 10'000'000;
// Utilities are tabulated at construction below this many joint actions.
inline constexpr std::uint64_t kDenseCacheLimit = 1'000'000;

class SizeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// KL(p || q) with p(a) > 0 and q(a) == 0.
class SupportError : public std::invalid_argument {
 public:
  SupportError(std::size_t action, const std::string& what)
      : std::invalid_argument(what), action_(action) {}
  std::size_t action() const { return action_; }

 private:
  std::size_t action_;
};

// A probability distribution over one player's actions.
class Policy {
 public:
  Policy() = default;
  // Throws std::invalid_argument unless entries are >= 0 and sum to 1 within
  // 1e-9.
  explicit Policy(std::vector<double> probs);

  static Policy uniform(std::size_t num_actions);
  static Policy pure(std::size_t num_actions, std::size_t action);
  // Divides nonnegative weights by their sum.
  static Policy normalized(std::vector<double> weights);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t a) const { return probs_[a]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vec() const { return probs_; }

  double min_prob() const;
  bool full_support() const { return min_prob() > 0.0; }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::vector<double> probs_;
};

// One policy per player.
using Profile = std::vector<Policy>;

struct RewardBounds {
  double lo = -1.0;
  double hi = 1.0;
  double range() const { return hi - lo; }
};

using JointAction = std::vector<std::size_t>;
using UtilityFn =
    std::function<double(int player, std::span<const std::size_t> joint)>;

// N-player simultaneous-move game given by a utility oracle. Reward bounds are
// declared by the constructor of each game rather than inferred. Immutable
// after construction.
class NormalFormGame {
 public:
  NormalFormGame(std::string name, std::vector<std::size_t> action_counts,
                 std::vector<RewardBounds> bounds, UtilityFn utility,
                 bool zero_sum,
                 std::vector<std::vector<std::string>> action_labels = {});

  const std::string& name() const { return name_; }
  int num_players() const { return static_cast<int>(action_counts_.size()); }
  std::size_t num_actions(int player) const { return action_counts_[player]; }
  const std::vector<std::size_t>& action_counts() const {
    return action_counts_;
  }
  // Saturates at UINT64_MAX.
  std::uint64_t num_joint_actions() const { return num_joint_; }
  const RewardBounds& bounds(int player) const { return bounds_[player]; }
  // D_i, the width of the declared reward interval.
  double range(int player) const { return bounds_[player].range(); }
  bool zero_sum() const { return zero_sum_; }
  // Falls back to the decimal index when no labels were supplied.
  std::string action_label(int player, std::size_t action) const;

  double utility(int player, std::span<const std::size_t> joint) const;

  bool has_dense_cache() const { return !table_.empty(); }
  bool two_player_dense() const { return num_players() == 2 && has_dense_cache(); }
  // For two-player games with a dense cache: the utility matrix of `player`
  // with rows indexed by that player's actions (own-major) or by the
  // opponent's actions (opponent-major), both row-major.
  std::span<const double> own_major(int player) const;
  std::span<const double> opponent_major(int player) const;

  std::uint64_t joint_index(std::span<const std::size_t> joint) const;
  void joint_from_index(std::uint64_t index, std::span<std::size_t> joint) const;

  // Checks the reward-bound and zero-sum invariants; exhaustively up to
  // kDenseCacheLimit joint actions, by `samples` seeded draws otherwise.
  // Throws std::logic_error on the first violation.
  void validate(std::uint64_t samples = 100'000, std::uint64_t seed = 0) const;

 private:
  std::string name_;
  std::vector<std::size_t> action_counts_;
  std::vector<RewardBounds> bounds_;
  UtilityFn oracle_;
  bool zero_sum_;
  std::vector<std::vector<std::string>> labels_;
  std::uint64_t num_joint_ = 1;
  // table_[player * num_joint_ + joint_index]
  std::vector<double> table_;
  std::vector<std::vector<double>> own_major_;
  std::vector<std::vector<double>> opponent_major_;
};

// u_i(a, pi_{-i}) for every action a of `player`, written into `out`.
// Throws SizeLimitError when the joint-action space is too large for exact
// evaluation.
void action_values(const NormalFormGame& game, const Profile& profile,
                   int player, std::span<double> out);
std::vector<double> action_values(const NormalFormGame& game,
                                  const Profile& profile, int player);
// Same, over raw probability vectors (one per player, sizes unchecked).
void action_values(const NormalFormGame& game,
                   std::span<const std::span<const double>> policies,
                   int player, std::span<double> out);

// u_i(a, a_{-i}) for every a, given a joint action whose own entry is ignored.
void action_values_vs(const NormalFormGame& game,
                      std::span<const std::size_t> joint, int player,
                      std::span<double> out);

// Multilinear extension of u_i to mixed profiles. Exact; no sampling.
double expected_utility(const NormalFormGame& game, const Profile& profile,
                        int player);

struct BestResponse {
  std::size_t action = 0;
  double value = 0.0;
};

// Ties go to the lowest action index.
BestResponse best_response(const NormalFormGame& game, const Profile& profile,
                           int player);

struct Exploitability {
  // gaps[i] = best-response value minus expected utility of player i.
  std::vector<double> gaps;
  double total = 0.0;
  // The smallest eps for which the profile is an eps-Nash equilibrium.
  double max_gap() const;
};

Exploitability exploitability(const NormalFormGame& game,
                              const Profile& profile);

// KL(p || q) in nats, with 0 log 0 = 0. Throws SupportError naming the first
// action where p > 0 and q == 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);
inline double kl_divergence(const Policy& p, const Policy& q) {
  return kl_divergence(p.probs(), q.probs());
}

// beta = max_a log(1 / tau(a)).
double max_log_inverse(const Policy& tau);

// Throws std::invalid_argument if the profile does not match the game.
void check_profile(const NormalFormGame& game, const Profile& profile);

}  // namespace pikl

#endif  // PIKL_GAME_H_
