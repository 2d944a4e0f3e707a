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

#include "pikl/anchored.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pikl/kernels.h"

namespace pikl {
namespace {

void check_inputs(std::span<const double> q, const Policy& tau, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument(
        "anchored objectives need lambda > 0; use an argmax for lambda = 0");
  }
  if (q.size() != tau.size()) {
    throw std::invalid_argument("value and anchor sizes differ");
  }
  if (!tau.full_support()) {
    throw std::invalid_argument("anchor policy must have full support");
  }
}

double reverse_kl_mass(std::span<const double> q, const Policy& tau,
                       double lambda, double alpha) {
  double total = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    total += lambda * tau[a] / (alpha - q[a]);
  }
  return total;
}

// One damped sweep of the response map; returns the residual measured before
// the step. The profile is left unchanged when the residual is within
// `tolerance`.
double qre_step(const NormalFormGame& game, const Profile& anchors,
                double lambda, double damping, double tolerance,
                Profile& profile) {
  double residual = 0.0;
  Profile next = profile;
  for (int p = 0; p < game.num_players(); ++p) {
    const std::vector<double> values = action_values(game, profile, p);
    const Policy response = softmax_anchored(values, anchors[p], lambda);
    std::vector<double> mixed(response.size());
    for (std::size_t a = 0; a < mixed.size(); ++a) {
      residual = std::max(residual, std::abs(response[a] - profile[p][a]));
      mixed[a] = (1.0 - damping) * profile[p][a] + damping * response[a];
    }
    next[p] = Policy::normalized(std::move(mixed));
  }
  if (residual > tolerance) profile = std::move(next);
  return residual;
}

}  // namespace

Policy softmax_anchored(std::span<const double> q, const Policy& tau,
                        double lambda) {
  check_inputs(q, tau, lambda);
  std::vector<double> logits(q.size());
  for (std::size_t a = 0; a < q.size(); ++a) {
    logits[a] = std::log(tau[a]) + q[a] / lambda;
  }
  const double top = kernels::max_value(logits);
  for (double& v : logits) v = std::exp(v - top);
  return Policy::normalized(std::move(logits));
}

ReverseKlSolution reverse_kl_opt(std::span<const double> q, const Policy& tau,
                                 double lambda) {
  check_inputs(q, tau, lambda);
  const double q_max = kernels::max_value(q);
  // At alpha = max q + lambda every term is at most lambda tau(a) / lambda,
  // so the mass is <= 1. At alpha = max q + lambda tau(a*) for a maximizing
  // action a*, that term alone is 1.
  double tau_at_max = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (q[a] == q_max) tau_at_max = std::max(tau_at_max, tau[a]);
  }
  double lo = q_max + lambda * tau_at_max;
  double hi = q_max + lambda;
  ReverseKlSolution sol;
  double alpha = hi;
  double mass = reverse_kl_mass(q, tau, lambda, hi);
  if (std::abs(mass - 1.0) > 1e-12) {
    for (sol.iterations = 1; sol.iterations <= 200; ++sol.iterations) {
      alpha = 0.5 * (lo + hi);
      mass = reverse_kl_mass(q, tau, lambda, alpha);
      if (std::abs(mass - 1.0) <= 1e-12) break;
      // Mass is strictly decreasing in alpha on (max q, inf).
      (mass > 1.0 ? lo : hi) = alpha;
      if (!(lo < hi)) break;
    }
  }
  std::vector<double> probs(q.size());
  for (std::size_t a = 0; a < q.size(); ++a) {
    probs[a] = lambda * tau[a] / (alpha - q[a]);
  }
  sol.alpha = alpha;
  sol.policy = Policy::normalized(std::move(probs));
  return sol;
}

double anchored_qre_residual(const NormalFormGame& game, const Profile& anchors,
                             double lambda, const Profile& profile) {
  double residual = 0.0;
  for (int p = 0; p < game.num_players(); ++p) {
    const std::vector<double> values = action_values(game, profile, p);
    const Policy response = softmax_anchored(values, anchors[p], lambda);
    for (std::size_t a = 0; a < response.size(); ++a) {
      residual = std::max(residual, std::abs(response[a] - profile[p][a]));
    }
  }
  return residual;
}

QreResult anchored_qre(const NormalFormGame& game, const Profile& anchors,
                       double lambda, const QreOptions& options) {
  check_profile(game, anchors);
  if (!(lambda > 0.0)) throw std::invalid_argument("QRE needs lambda > 0");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw std::invalid_argument("damping must lie in (0, 1]");
  }
  QreResult result;
  double damping = options.damping;
  for (int attempt = 0; attempt <= options.max_backoffs; ++attempt) {
    Profile profile = anchors;
    double residual = 0.0;
    std::uint64_t it = 0;
    for (; it < options.max_iters; ++it) {
      residual = qre_step(game, anchors, lambda, damping, options.tolerance,
                          profile);
      if (residual <= options.tolerance) break;
    }
    result.iterations += it;
    result.damping = damping;
    result.profile = profile;
    result.residual = anchored_qre_residual(game, anchors, lambda, profile);
    if (result.residual <= options.tolerance) {
      result.converged = true;
      return result;
    }
    damping *= 0.5;
  }
  return result;
}

}  // namespace pikl
