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

#include "pikl/solvers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "pikl/kernels.h"

namespace pikl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// In-place softmax with max subtraction.
void softmax_inplace(std::span<double> x) {
  const double top = kernels::max_value(x);
  for (double& v : x) v = std::exp(v - top);
  const double inv = 1.0 / kernels::sum(x);
  for (double& v : x) v *= inv;
}

double log_sum_exp(std::span<const double> x) {
  const double top = kernels::max_value(x);
  double total = 0.0;
  for (double v : x) total += std::exp(v - top);
  return top + std::log(total);
}

std::vector<double> checked_log_anchor(const Policy& anchor) {
  if (!anchor.full_support()) {
    throw std::invalid_argument("anchor policy must have full support");
  }
  std::vector<double> out(anchor.size());
  for (std::size_t a = 0; a < anchor.size(); ++a) out[a] = std::log(anchor[a]);
  return out;
}

void pikl_exponent(std::span<const double> cv, std::span<const double> log_tau,
                   double lambda, double eta, std::uint64_t t,
                   std::span<double> out) {
  const double tle = static_cast<double>(t) * lambda * eta;
  const double denom = 1.0 + tle;
  kernels::axpby(eta / denom, cv, tle / denom, log_tau, out);
}

void rm_iterate(std::span<const double> regrets, std::span<double> out) {
  double total = 0.0;
  for (std::size_t a = 0; a < regrets.size(); ++a) {
    out[a] = std::max(regrets[a], 0.0);
    total += out[a];
  }
  if (total > 0.0) {
    for (double& v : out) v /= total;
  } else {
    std::fill(out.begin(), out.end(), 1.0 / out.size());
  }
}

bool is_checkpoint(std::uint64_t t, std::uint64_t last) {
  return t == last || (t & (t - 1)) == 0;
}

}  // namespace

double theory_eta(double lambda, double beta, double range) {
  return 1.0 / (lambda * beta + 2.0 * range);
}

double adaptive_eta(double c, double sigma, std::uint64_t t) {
  if (!(sigma > 0.0) || t == 0) return c;
  return c / (sigma * std::sqrt(static_cast<double>(t)));
}

EtaSchedule EtaSchedule::constant(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  return EtaSchedule(false, eta);
}

EtaSchedule EtaSchedule::adaptive(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("adaptive scale must be > 0");
  return EtaSchedule(true, c);
}

double EtaSchedule::at(std::uint64_t t) const {
  if (!adaptive_) return value_;
  if (t < 2) return value_;
  return adaptive_eta(value_, sigma(), t);
}

void EtaSchedule::record(double utility) {
  ++count_;
  const double delta = utility - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (utility - mean_);
}

double EtaSchedule::sigma() const {
  if (count_ < 2) return 0.0;
  return std::sqrt(std::max(m2_, 0.0) / static_cast<double>(count_));
}

Policy pikl_policy(std::span<const double> cumulative_values,
                   const Policy& anchor, double lambda, double eta,
                   std::uint64_t t) {
  if (cumulative_values.size() != anchor.size()) {
    throw std::invalid_argument("value and anchor sizes differ");
  }
  if (!(lambda >= 0.0) || !(eta > 0.0)) {
    throw std::invalid_argument("piKL needs lambda >= 0 and eta > 0");
  }
  const std::vector<double> log_tau = checked_log_anchor(anchor);
  std::vector<double> probs(anchor.size());
  pikl_exponent(cumulative_values, log_tau, lambda, eta, t, probs);
  softmax_inplace(probs);
  return Policy(std::move(probs));
}

Policy hedge_policy(std::span<const double> regrets, double eta) {
  std::vector<double> probs(regrets.size());
  for (std::size_t a = 0; a < regrets.size(); ++a) probs[a] = eta * regrets[a];
  softmax_inplace(probs);
  return Policy(std::move(probs));
}

Policy rm_policy(std::span<const double> regrets) {
  std::vector<double> probs(regrets.size());
  rm_iterate(regrets, probs);
  return Policy(std::move(probs));
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::kPikl:
      return "pikl";
    case SolverKind::kHedge:
      return "hedge";
    case SolverKind::kRegretMatching:
      return "rm";
  }
  return "unknown";
}

Learner::Learner(Policy anchor, double lambda)
    : log_anchor_(checked_log_anchor(anchor)),
      anchor_(std::move(anchor)),
      lambda_(lambda),
      iterate_(anchor_.size(), 0.0),
      avg_sum_(anchor_.size(), 0.0),
      cv_(anchor_.size(), 0.0) {
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
}

std::span<const double> Learner::begin_iteration() {
  ++t_;
  compute_iterate(iterate_);
  kernels::axpy(1.0, iterate_, avg_sum_);
  return iterate_;
}

void Learner::observe(std::span<const double> utilities) {
  if (utilities.size() != cv_.size()) {
    throw std::invalid_argument("utility vector has the wrong size");
  }
  const double realized = kernels::dot(iterate_, utilities);
  kernels::axpy(1.0, utilities, cv_);
  realized_ += realized;
  if (lambda_ > 0.0) {
    realized_regularized_ +=
        realized - lambda_ * kl_divergence(iterate_, anchor_.probs());
  } else {
    realized_regularized_ += realized;
  }
  update(utilities, realized);
}

Policy Learner::average_policy() const {
  if (t_ == 0) return anchor_;
  std::vector<double> avg(avg_sum_);
  for (double& v : avg) v /= static_cast<double>(t_);
  return Policy::normalized(std::move(avg));
}

double Learner::raw_regret() const {
  if (t_ == 0) return 0.0;
  return kernels::max_value(cv_) - realized_;
}

double Learner::regularized_regret() const {
  if (t_ == 0) return 0.0;
  if (lambda_ == 0.0) return raw_regret();
  // max_pi <pi, CV> - T lambda KL(pi || tau) = T lambda log sum tau exp(CV / (T lambda))
  const double scale = static_cast<double>(t_) * lambda_;
  std::vector<double> z(cv_.size());
  kernels::axpby(1.0 / scale, cv_, 1.0, log_anchor_, z);
  return scale * log_sum_exp(z) - realized_regularized_;
}

PiklHedge::PiklHedge(Policy anchor, double lambda, EtaSchedule eta)
    : Learner(std::move(anchor), lambda), eta_(eta) {}

void PiklHedge::compute_iterate(std::span<double> out) {
  current_eta_ = eta_.at(iteration());
  pikl_exponent(cumulative_values(), log_anchor_, lambda(), current_eta_,
                iteration(), out);
  softmax_inplace(out);
}

void PiklHedge::update(std::span<const double>, double realized) {
  eta_.record(realized);
}

Hedge::Hedge(std::size_t num_actions, EtaSchedule eta,
             std::optional<Policy> anchor)
    : Learner(anchor ? *anchor : Policy::uniform(num_actions), 0.0),
      eta_(eta),
      regrets_(num_actions, 0.0) {
  if (this->anchor().size() != num_actions) {
    throw std::invalid_argument("anchor size differs from action count");
  }
}

void Hedge::compute_iterate(std::span<double> out) {
  current_eta_ = eta_.at(iteration());
  // Regrets and cumulative values differ by an action-independent shift, so
  // the softmax is the same. Cumulative values avoid the rounding of the
  // subtraction and match piKL at lambda = 0 bit for bit.
  const std::span<const double> cv = cumulative_values();
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = current_eta_ * cv[a];
  softmax_inplace(out);
}

void Hedge::update(std::span<const double> utilities, double realized) {
  for (std::size_t a = 0; a < regrets_.size(); ++a) {
    regrets_[a] += utilities[a] - realized;
  }
  eta_.record(realized);
}

RegretMatching::RegretMatching(std::size_t num_actions,
                               std::optional<Policy> anchor)
    : Learner(anchor ? *anchor : Policy::uniform(num_actions), 0.0),
      regrets_(num_actions, 0.0) {
  if (this->anchor().size() != num_actions) {
    throw std::invalid_argument("anchor size differs from action count");
  }
}

double RegretMatching::eta() const { return kNaN; }

void RegretMatching::compute_iterate(std::span<double> out) {
  rm_iterate(regrets_, out);
}

void RegretMatching::update(std::span<const double> utilities,
                            double realized) {
  for (std::size_t a = 0; a < regrets_.size(); ++a) {
    regrets_[a] += utilities[a] - realized;
  }
}

std::size_t play_sampled(Learner& learner, const NormalFormGame& game,
                         int player, std::span<const std::size_t> opponents,
                         Rng& rng) {
  learner.begin_iteration();
  const std::size_t action = learner.sample(rng);
  std::vector<double> values(game.num_actions(player));
  action_values_vs(game, opponents, player, values);
  learner.observe(values);
  return action;
}

Policy play_exact(Learner& learner, const NormalFormGame& game, int player,
                  const Profile& opponents) {
  if (static_cast<int>(opponents.size()) != game.num_players()) {
    throw std::invalid_argument("opponent profile must list every player");
  }
  const auto iterate = learner.begin_iteration();
  std::vector<std::span<const double>> spans;
  for (int p = 0; p < game.num_players(); ++p) {
    spans.push_back(p == player ? iterate : opponents[p].probs());
  }
  std::vector<double> values(game.num_actions(player));
  action_values(game, spans, player, values);
  Policy played = Policy::normalized({iterate.begin(), iterate.end()});
  learner.observe(values);
  return played;
}

std::unique_ptr<Learner> make_learner(const SolverSpec& spec,
                                      const NormalFormGame& game, int player) {
  const std::size_t n = game.num_actions(player);
  const Policy anchor = spec.anchor ? *spec.anchor : Policy::uniform(n);
  if (anchor.size() != n) {
    throw std::invalid_argument("anchor of player " + std::to_string(player) +
                                " has the wrong number of actions");
  }
  auto schedule = [&]() {
    switch (spec.eta.mode) {
      case EtaSpec::Mode::kConstant:
        return EtaSchedule::constant(spec.eta.value);
      case EtaSpec::Mode::kAdaptive:
        return EtaSchedule::adaptive(spec.eta.value > 0.0 ? spec.eta.value
                                                          : kDefaultEtaScale);
      case EtaSpec::Mode::kTheory:
        break;
    }
    const double lambda = spec.kind == SolverKind::kPikl ? spec.lambda : 0.0;
    return EtaSchedule::constant(
        theory_eta(lambda, max_log_inverse(anchor), game.range(player)));
  };
  switch (spec.kind) {
    case SolverKind::kPikl:
      return std::make_unique<PiklHedge>(anchor, spec.lambda, schedule());
    case SolverKind::kHedge:
      return std::make_unique<Hedge>(n, schedule(), anchor);
    case SolverKind::kRegretMatching:
      return std::make_unique<RegretMatching>(n, anchor);
  }
  throw std::invalid_argument("unknown solver kind");
}

SelfplayResult run_selfplay(const NormalFormGame& game,
                            const std::vector<SolverSpec>& solvers,
                            const SelfplayOptions& options) {
  const int n = game.num_players();
  if (static_cast<int>(solvers.size()) != n) {
    throw std::invalid_argument("one solver spec per player required");
  }
  if (options.iterations < 1) throw std::invalid_argument("T must be >= 1");
  const bool exact_ok = game.num_joint_actions() <= kExactJointLimit;
  if (options.mode == UpdateMode::kExact && !exact_ok) {
    throw SizeLimitError("game '" + game.name() +
                         "' is too large for exact updates; use sampled mode");
  }

  std::vector<std::unique_ptr<Learner>> learners;
  for (int p = 0; p < n; ++p) learners.push_back(make_learner(solvers[p], game, p));

  Rng rng(options.seed);
  std::vector<std::span<const double>> iterates(n);
  std::vector<std::vector<double>> values(n);
  for (int p = 0; p < n; ++p) values[p].resize(game.num_actions(p));
  JointAction joint(n, 0);
  SelfplayResult result;

  const std::uint64_t T = options.iterations;
  for (std::uint64_t t = 1; t <= T; ++t) {
    for (int p = 0; p < n; ++p) iterates[p] = learners[p]->begin_iteration();
    if (options.mode == UpdateMode::kExact) {
      for (int p = 0; p < n; ++p) action_values(game, iterates, p, values[p]);
    } else {
      for (int p = 0; p < n; ++p) joint[p] = learners[p]->sample(rng);
      for (int p = 0; p < n; ++p) action_values_vs(game, joint, p, values[p]);
    }
    if (options.on_iteration) options.on_iteration(t, iterates);

    if (is_checkpoint(t, T)) {
      // Diagnostics use the iterate of this round and the average through it.
      Profile average;
      for (int p = 0; p < n; ++p) average.push_back(learners[p]->average_policy());
      std::vector<double> gaps(n, kNaN);
      if (exact_ok) gaps = exploitability(game, average).gaps;
      std::vector<CheckpointRow> rows(n);
      for (int p = 0; p < n; ++p) {
        rows[p].t = t;
        rows[p].player = p;
        rows[p].kl_iterate = kl_divergence(iterates[p], learners[p]->anchor().probs());
        rows[p].kl_avg = kl_divergence(average[p], learners[p]->anchor());
        rows[p].exploitability = gaps[p];
        rows[p].eta = learners[p]->eta();
      }
      for (int p = 0; p < n; ++p) learners[p]->observe(values[p]);
      for (int p = 0; p < n; ++p) {
        rows[p].regret = learners[p]->regularized_regret();
        rows[p].raw_regret = learners[p]->raw_regret();
        result.trajectory.push_back(rows[p]);
      }
    } else {
      for (int p = 0; p < n; ++p) learners[p]->observe(values[p]);
    }
  }

  for (int p = 0; p < n; ++p) {
    const Learner& l = *learners[p];
    result.average.push_back(l.average_policy());
    result.last_iterate.push_back(
        Policy::normalized({l.iterate().begin(), l.iterate().end()}));
    result.players.push_back({l.regularized_regret(), l.raw_regret(), l.eta(),
                              kl_divergence(result.average[p], l.anchor())});
  }
  return result;
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<CheckpointRow>& rows) {
  const auto old_precision = out.precision(9);
  out << "t,player,kl_iterate,kl_avg,regret,exploitability,eta,raw_regret\n";
  for (const CheckpointRow& r : rows) {
    out << r.t << ',' << r.player << ',' << r.kl_iterate << ',' << r.kl_avg
        << ',' << r.regret << ',' << r.exploitability << ',' << r.eta << ','
        << r.raw_regret << '\n';
  }
  out.precision(old_precision);
}

}  // namespace pikl
