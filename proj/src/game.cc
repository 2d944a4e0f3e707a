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

#include "pikl/game.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pikl/kernels.h"
#include "pikl/rng.h"

namespace pikl {
namespace {

constexpr double kSimplexTolerance = 1e-9;

std::uint64_t saturating_product(const std::vector<std::size_t>& counts) {
  std::uint64_t total = 1;
  for (std::size_t c : counts) {
    if (c != 0 && total > std::numeric_limits<std::uint64_t>::max() / c) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= c;
  }
  return total;
}

void require_exact(const NormalFormGame& game) {
  if (game.num_joint_actions() > kExactJointLimit) {
    std::ostringstream msg;
    msg << "game '" << game.name() << "' has " << game.num_joint_actions()
        << " joint actions, above the exact-evaluation limit of "
        << kExactJointLimit << "; use sampled mode";
    throw SizeLimitError(msg.str());
  }
}

// Advances a mixed-radix counter, skipping position `fixed`. Returns false
// after the last combination.
bool next_joint(std::span<std::size_t> joint,
                const std::vector<std::size_t>& counts, int fixed) {
  for (int p = static_cast<int>(joint.size()) - 1; p >= 0; --p) {
    if (p == fixed) continue;
    if (++joint[p] < counts[p]) return true;
    joint[p] = 0;
  }
  return false;
}

}  // namespace

Policy::Policy(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("policy over zero actions");
  double total = 0.0;
  for (std::size_t a = 0; a < probs_.size(); ++a) {
    if (!(probs_[a] >= 0.0) || !std::isfinite(probs_[a])) {
      throw std::invalid_argument("policy entry " + std::to_string(a) +
                                  " is negative or not finite");
    }
    total += probs_[a];
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument("policy entries sum to " +
                                std::to_string(total));
  }
}

Policy Policy::uniform(std::size_t num_actions) {
  return Policy(std::vector<double>(num_actions, 1.0 / num_actions));
}

Policy Policy::pure(std::size_t num_actions, std::size_t action) {
  std::vector<double> probs(num_actions, 0.0);
  probs.at(action) = 1.0;
  return Policy(std::move(probs));
}

Policy Policy::normalized(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("negative policy weight");
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("policy weights have no positive finite mass");
  }
  for (double& w : weights) w /= total;
  return Policy(std::move(weights));
}

double Policy::min_prob() const {
  return probs_.empty() ? 0.0 : *std::min_element(probs_.begin(), probs_.end());
}

NormalFormGame::NormalFormGame(std::string name,
                               std::vector<std::size_t> action_counts,
                               std::vector<RewardBounds> bounds,
                               UtilityFn utility, bool zero_sum,
                               std::vector<std::vector<std::string>> labels)
    : name_(std::move(name)),
      action_counts_(std::move(action_counts)),
      bounds_(std::move(bounds)),
      oracle_(std::move(utility)),
      zero_sum_(zero_sum),
      labels_(std::move(labels)) {
  if (action_counts_.empty()) throw std::invalid_argument("game has no players");
  if (bounds_.size() != action_counts_.size()) {
    throw std::invalid_argument("one reward interval per player required");
  }
  for (std::size_t c : action_counts_) {
    if (c == 0) throw std::invalid_argument("player with no actions");
  }
  for (const RewardBounds& b : bounds_) {
    if (!(b.hi >= b.lo)) throw std::invalid_argument("empty reward interval");
  }
  if (!oracle_) throw std::invalid_argument("missing utility oracle");
  num_joint_ = saturating_product(action_counts_);

  if (num_joint_ > kDenseCacheLimit) return;
  const int n = num_players();
  table_.resize(static_cast<std::size_t>(n * num_joint_));
  JointAction joint(n, 0);
  for (std::uint64_t idx = 0; idx < num_joint_; ++idx) {
    joint_from_index(idx, joint);
    for (int p = 0; p < n; ++p) table_[p * num_joint_ + idx] = oracle_(p, joint);
  }
  if (n != 2) return;
  own_major_.resize(2);
  opponent_major_.resize(2);
  const std::size_t n0 = action_counts_[0];
  const std::size_t n1 = action_counts_[1];
  for (int p = 0; p < 2; ++p) {
    const double* u = table_.data() + p * num_joint_;
    auto& own = own_major_[p];
    auto& opp = opponent_major_[p];
    own.resize(num_joint_);
    opp.resize(num_joint_);
    for (std::size_t a0 = 0; a0 < n0; ++a0) {
      for (std::size_t a1 = 0; a1 < n1; ++a1) {
        const double v = u[a0 * n1 + a1];
        if (p == 0) {
          own[a0 * n1 + a1] = v;
          opp[a1 * n0 + a0] = v;
        } else {
          own[a1 * n0 + a0] = v;
          opp[a0 * n1 + a1] = v;
        }
      }
    }
  }
}

std::string NormalFormGame::action_label(int player, std::size_t action) const {
  if (static_cast<std::size_t>(player) < labels_.size() &&
      action < labels_[player].size()) {
    return labels_[player][action];
  }
  return std::to_string(action);
}

double NormalFormGame::utility(int player,
                               std::span<const std::size_t> joint) const {
  if (has_dense_cache()) return table_[player * num_joint_ + joint_index(joint)];
  return oracle_(player, joint);
}

std::span<const double> NormalFormGame::own_major(int player) const {
  return own_major_.at(player);
}

std::span<const double> NormalFormGame::opponent_major(int player) const {
  return opponent_major_.at(player);
}

std::uint64_t NormalFormGame::joint_index(
    std::span<const std::size_t> joint) const {
  std::uint64_t idx = 0;
  for (std::size_t p = 0; p < action_counts_.size(); ++p) {
    idx = idx * action_counts_[p] + joint[p];
  }
  return idx;
}

void NormalFormGame::joint_from_index(std::uint64_t index,
                                      std::span<std::size_t> joint) const {
  for (std::size_t p = action_counts_.size(); p-- > 0;) {
    joint[p] = static_cast<std::size_t>(index % action_counts_[p]);
    index /= action_counts_[p];
  }
}

void NormalFormGame::validate(std::uint64_t samples, std::uint64_t seed) const {
  const int n = num_players();
  JointAction joint(n, 0);
  auto check = [&](std::span<const std::size_t> j) {
    double total = 0.0;
    for (int p = 0; p < n; ++p) {
      const double u = utility(p, j);
      if (!(u >= bounds_[p].lo && u <= bounds_[p].hi)) {
        throw std::logic_error("game '" + name_ + "': utility " +
                               std::to_string(u) + " of player " +
                               std::to_string(p) + " outside declared bounds");
      }
      total += u;
    }
    if (zero_sum_ && std::abs(total) > 1e-9) {
      throw std::logic_error("game '" + name_ + "' is flagged zero-sum but "
                             "utilities sum to " + std::to_string(total));
    }
  };
  if (num_joint_ <= kDenseCacheLimit) {
    for (std::uint64_t idx = 0; idx < num_joint_; ++idx) {
      joint_from_index(idx, joint);
      check(joint);
    }
    return;
  }
  Rng rng(seed);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (int p = 0; p < n; ++p) {
      joint[p] = static_cast<std::size_t>(rng.uniform() * action_counts_[p]);
    }
    check(joint);
  }
}

void check_profile(const NormalFormGame& game, const Profile& profile) {
  if (static_cast<int>(profile.size()) != game.num_players()) {
    throw std::invalid_argument("profile has " + std::to_string(profile.size()) +
                                " policies for a " +
                                std::to_string(game.num_players()) +
                                "-player game");
  }
  for (int p = 0; p < game.num_players(); ++p) {
    if (profile[p].size() != game.num_actions(p)) {
      throw std::invalid_argument("policy of player " + std::to_string(p) +
                                  " has the wrong number of actions");
    }
  }
}

void action_values(const NormalFormGame& game,
                   std::span<const std::span<const double>> policies,
                   int player, std::span<double> out) {
  require_exact(game);
  if (game.two_player_dense()) {
    const int other = 1 - player;
    kernels::gemv(game.own_major(player), game.num_actions(player),
                  game.num_actions(other), policies[other], out);
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  const int n = game.num_players();
  JointAction joint(n, 0);
  do {
    double weight = 1.0;
    for (int p = 0; p < n && weight != 0.0; ++p) {
      if (p != player) weight *= policies[p][joint[p]];
    }
    if (weight == 0.0) continue;
    for (std::size_t a = 0; a < game.num_actions(player); ++a) {
      joint[player] = a;
      out[a] += weight * game.utility(player, joint);
    }
    joint[player] = 0;
  } while (next_joint(joint, game.action_counts(), player));
}

void action_values(const NormalFormGame& game, const Profile& profile,
                   int player, std::span<double> out) {
  check_profile(game, profile);
  std::vector<std::span<const double>> spans;
  spans.reserve(profile.size());
  for (const Policy& p : profile) spans.push_back(p.probs());
  action_values(game, spans, player, out);
}

std::vector<double> action_values(const NormalFormGame& game,
                                  const Profile& profile, int player) {
  std::vector<double> out(game.num_actions(player));
  action_values(game, profile, player, out);
  return out;
}

void action_values_vs(const NormalFormGame& game,
                      std::span<const std::size_t> joint, int player,
                      std::span<double> out) {
  const std::size_t own = game.num_actions(player);
  if (game.two_player_dense()) {
    const int other = 1 - player;
    const auto row = game.opponent_major(player).subspan(joint[other] * own, own);
    std::copy(row.begin(), row.end(), out.begin());
    return;
  }
  JointAction j(joint.begin(), joint.end());
  for (std::size_t a = 0; a < own; ++a) {
    j[player] = a;
    out[a] = game.utility(player, j);
  }
}

double expected_utility(const NormalFormGame& game, const Profile& profile,
                        int player) {
  const std::vector<double> values = action_values(game, profile, player);
  return kernels::dot(profile[player].probs(), values);
}

BestResponse best_response(const NormalFormGame& game, const Profile& profile,
                           int player) {
  const std::vector<double> values = action_values(game, profile, player);
  BestResponse br{0, values[0]};
  for (std::size_t a = 1; a < values.size(); ++a) {
    if (values[a] > br.value) br = {a, values[a]};
  }
  return br;
}

double Exploitability::max_gap() const {
  return gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end());
}

Exploitability exploitability(const NormalFormGame& game,
                              const Profile& profile) {
  Exploitability result;
  for (int p = 0; p < game.num_players(); ++p) {
    const std::vector<double> values = action_values(game, profile, p);
    const double best = *std::max_element(values.begin(), values.end());
    const double current = kernels::dot(profile[p].probs(), values);
    result.gaps.push_back(best - current);
    result.total += best - current;
  }
  return result;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("KL divergence of policies of different sizes");
  }
  double kl = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    if (q[a] <= 0.0) {
      throw SupportError(a, "KL divergence undefined: p(" + std::to_string(a) +
                                ") > 0 but q(" + std::to_string(a) + ") = 0");
    }
    kl += p[a] * std::log(p[a] / q[a]);
  }
  return kl;
}

double max_log_inverse(const Policy& tau) {
  const double m = tau.min_prob();
  if (!(m > 0.0)) throw std::invalid_argument("anchor lacks full support");
  return -std::log(m);
}

}  // namespace pikl
