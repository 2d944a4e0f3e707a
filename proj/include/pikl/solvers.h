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

#ifndef PIKL_SOLVERS_H_
#define PIKL_SOLVERS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pikl/game.h"
#include "pikl/rng.h"

namespace pikl {

inline constexpr double kDefaultEtaScale = 10.0 / 3.0;

// Largest learning rate covered by the piKL regret bound:
// 1 / (lambda * beta + 2 * range).
double theory_eta(double lambda, double beta, double range);

// c / (sigma * sqrt(t)); falls back to c when sigma is zero.
double adaptive_eta(double c, double sigma, std::uint64_t t);

// Learning-rate schedule for Hedge-style learners. The adaptive mode tracks
// the spread of the per-iteration utility experienced by the learner and uses
// eta_1 = c until a spread is available.
class EtaSchedule {
 public:
  static EtaSchedule constant(double eta);
  static EtaSchedule adaptive(double c = kDefaultEtaScale);

  bool is_adaptive() const { return adaptive_; }
  // Learning rate for iteration t (1-based), given the utilities recorded for
  // iterations 1..t-1.
  double at(std::uint64_t t) const;
  void record(double utility);
  // Population standard deviation of the recorded utilities.
  double sigma() const;

 private:
  EtaSchedule(bool adaptive, double value) : adaptive_(adaptive), value_(value) {}

  bool adaptive_;
  double value_;
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Iterate of piKL-Hedge for iteration t given CV^{t-1}:
// pi(a) ∝ exp((eta * cv(a) + t * lambda * eta * log tau(a)) / (1 + t * lambda * eta)).
// Throws std::invalid_argument if the anchor lacks full support.
Policy pikl_policy(std::span<const double> cumulative_values,
                   const Policy& anchor, double lambda, double eta,
                   std::uint64_t t);
// pi ∝ exp(eta * regrets).
Policy hedge_policy(std::span<const double> regrets, double eta);
// pi ∝ max(regrets, 0), uniform when no regret is positive.
Policy rm_policy(std::span<const double> regrets);

enum class SolverKind { kPikl, kHedge, kRegretMatching };
std::string solver_name(SolverKind kind);

// State shared by the no-regret learners: iteration counter, cumulative
// per-action values, the average-policy accumulator, and realized-utility
// sums for regret measurement. An iteration is begin_iteration() followed by
// observe().
class Learner {
 public:
  // `anchor` is the reference policy for KL diagnostics (and the regularizer
  // for piKL); `lambda` is the regularization weight used for measuring
  // regularized regret.
  Learner(Policy anchor, double lambda);
  virtual ~Learner() = default;

  virtual SolverKind kind() const = 0;
  // Learning rate behind the current iterate; NaN for learners without one.
  virtual double eta() const { return current_eta_; }

  std::size_t num_actions() const { return anchor_.size(); }
  std::uint64_t iteration() const { return t_; }
  const Policy& anchor() const { return anchor_; }
  double lambda() const { return lambda_; }

  // t <- t + 1; computes pi^t and adds it to the average accumulator.
  std::span<const double> begin_iteration();
  std::span<const double> iterate() const { return iterate_; }
  std::size_t sample(Rng& rng) const { return rng.categorical(iterate_); }
  // Finishes iteration t with u(a, .) for every action a.
  void observe(std::span<const double> utilities);

  // (1/t) * sum of iterates.
  Policy average_policy() const;
  std::span<const double> cumulative_values() const { return cv_; }
  // Regret against the best fixed policy under u - lambda * KL(. || anchor).
  double regularized_regret() const;
  // Regret against the best fixed action under u.
  double raw_regret() const;

 protected:
  virtual void compute_iterate(std::span<double> out) = 0;
  virtual void update(std::span<const double> utilities, double realized) = 0;

  double current_eta_ = 0.0;
  std::vector<double> log_anchor_;

 private:
  Policy anchor_;
  double lambda_;
  std::uint64_t t_ = 0;
  std::vector<double> iterate_;
  std::vector<double> avg_sum_;
  std::vector<double> cv_;
  double realized_ = 0.0;
  double realized_regularized_ = 0.0;
};

// Policy-regularized Hedge. CV^0 = 0.
class PiklHedge final : public Learner {
 public:
  PiklHedge(Policy anchor, double lambda, EtaSchedule eta);
  SolverKind kind() const override { return SolverKind::kPikl; }

 private:
  void compute_iterate(std::span<double> out) override;
  void update(std::span<const double> utilities, double realized) override;

  EtaSchedule eta_;
};

// Multiplicative weights on cumulative regrets, pi ∝ exp(eta * R).
class Hedge final : public Learner {
 public:
  // `anchor` is used only for diagnostics.
  Hedge(std::size_t num_actions, EtaSchedule eta,
        std::optional<Policy> anchor = std::nullopt);
  SolverKind kind() const override { return SolverKind::kHedge; }
  std::span<const double> regrets() const { return regrets_; }

 private:
  void compute_iterate(std::span<double> out) override;
  void update(std::span<const double> utilities, double realized) override;

  EtaSchedule eta_;
  std::vector<double> regrets_;
};

class RegretMatching final : public Learner {
 public:
  explicit RegretMatching(std::size_t num_actions,
                          std::optional<Policy> anchor = std::nullopt);
  SolverKind kind() const override { return SolverKind::kRegretMatching; }
  double eta() const override;
  std::span<const double> regrets() const { return regrets_; }

 private:
  void compute_iterate(std::span<double> out) override;
  void update(std::span<const double> utilities, double realized) override;

  std::vector<double> regrets_;
};

// One sampled, full-information iteration for `player`: draws a^t from pi^t
// and credits every action with u(a, a_{-i}) for the given opponent actions
// (the entry for `player` is ignored). Returns a^t.
std::size_t play_sampled(Learner& learner, const NormalFormGame& game,
                         int player, std::span<const std::size_t> opponents,
                         Rng& rng);

// One exact-expectation iteration: credits every action with u(a, pi_{-i})
// (the entry for `player` is ignored). Returns the iterate pi^t.
Policy play_exact(Learner& learner, const NormalFormGame& game, int player,
                  const Profile& opponents);

struct EtaSpec {
  enum class Mode { kTheory, kConstant, kAdaptive };
  Mode mode = Mode::kTheory;
  // Constant learning rate, or the adaptive scale c.
  double value = 0.0;
};

struct SolverSpec {
  SolverKind kind = SolverKind::kPikl;
  double lambda = 0.0;
  // Uniform when absent.
  std::optional<Policy> anchor;
  EtaSpec eta;
};

// Resolves `spec` for `player` of `game`. Theory-mode eta uses the player's
// anchor and declared reward range.
std::unique_ptr<Learner> make_learner(const SolverSpec& spec,
                                      const NormalFormGame& game, int player);

enum class UpdateMode { kSampled, kExact };

struct CheckpointRow {
  std::uint64_t t = 0;
  int player = 0;
  double kl_iterate = 0.0;
  double kl_avg = 0.0;
  double regret = 0.0;
  // This player's best-response gain against the average profile; NaN when
  // the joint-action space is too large for exact evaluation.
  double exploitability = 0.0;
  double eta = 0.0;
  double raw_regret = 0.0;
};

struct SelfplayOptions {
  std::uint64_t iterations = 1000;
  UpdateMode mode = UpdateMode::kExact;
  std::uint64_t seed = 0;
  // Called after every iteration with the iterates of all players.
  std::function<void(std::uint64_t t, const std::vector<std::span<const double>>&)>
      on_iteration;
};

struct PlayerSummary {
  double regret = 0.0;
  double raw_regret = 0.0;
  double eta = 0.0;
  double kl_avg = 0.0;
};

struct SelfplayResult {
  Profile average;
  Profile last_iterate;
  std::vector<PlayerSummary> players;
  // At t = 1, 2, 4, ... and at the final iteration.
  std::vector<CheckpointRow> trajectory;
};

// All players learn simultaneously: each iteration every learner produces its
// iterate, then each observes the others' sampled actions (sampled mode) or
// iterates (exact mode).
SelfplayResult run_selfplay(const NormalFormGame& game,
                            const std::vector<SolverSpec>& solvers,
                            const SelfplayOptions& options);

// Columns: t,player,kl_iterate,kl_avg,regret,exploitability,eta,raw_regret.
void write_trajectory_csv(std::ostream& out,
                          const std::vector<CheckpointRow>& rows);

}  // namespace pikl

#endif  // PIKL_SOLVERS_H_
