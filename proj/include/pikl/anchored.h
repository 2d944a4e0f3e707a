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

#ifndef PIKL_ANCHORED_H_
#define PIKL_ANCHORED_H_

#include <cstdint>
#include <span>
#include <vector>

#include "pikl/game.h"

namespace pikl {

// argmax_pi <pi, q> - lambda * KL(pi || tau), i.e. pi(a) ∝ tau(a) exp(q(a) / lambda).
// Throws std::invalid_argument for lambda <= 0 or an anchor without full
// support.
Policy softmax_anchored(std::span<const double> q, const Policy& tau,
                        double lambda);

struct ReverseKlSolution {
  Policy policy;
  // Normalizer of pi(a) = lambda tau(a) / (alpha - q(a)).
  double alpha = 0.0;
  int iterations = 0;
};

// argmax_pi <pi, q> - lambda * KL(tau || pi). The maximizer has the form
// pi(a) = lambda tau(a) / (alpha - q(a)) with alpha > max q chosen so the
// entries sum to one; alpha is found by bisection.
ReverseKlSolution reverse_kl_opt(std::span<const double> q, const Policy& tau,
                                 double lambda);

struct QreOptions {
  std::uint64_t max_iters = 100'000;
  double damping = 0.5;
  double tolerance = 1e-10;
  // Each time a sweep of max_iters fails to converge, the damping is halved
  // and the iteration restarted from the anchors, at most this many times.
  int max_backoffs = 8;
};

struct QreResult {
  Profile profile;
  bool converged = false;
  // L-infinity distance between the profile and its image under the
  // anchored-softmax response map.
  double residual = 0.0;
  std::uint64_t iterations = 0;
  double damping = 0.0;
};

// Fixed point pi_i(a) ∝ tau_i(a) exp(u_i(a, pi_{-i}) / lambda) by damped
// simultaneous iteration pi <- (1 - g) pi + g * response(pi), starting from
// the anchors. Non-convergence is reported in the result, not thrown.
QreResult anchored_qre(const NormalFormGame& game, const Profile& anchors,
                       double lambda, const QreOptions& options = {});

// max_a |response(profile)_i(a) - profile_i(a)| over players i.
double anchored_qre_residual(const NormalFormGame& game, const Profile& anchors,
                             double lambda, const Profile& profile);

}  // namespace pikl

#endif  // PIKL_ANCHORED_H_
