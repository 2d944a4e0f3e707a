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

#ifndef PIKL_HARNESS_H_
#define PIKL_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pikl/game.h"
#include "pikl/solvers.h"
#include "pikl/toy_games.h"

namespace pikl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kBlottoSweep, kVerifyBounds, kMctsEval, kQreCheck };
std::string experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

struct AnchorSpec {
  enum class Kind {
    kUniform,
    // Softmax of standard normals, drawn per (seed, player).
    kRandom,
    kExplicit,
  };
  Kind kind = Kind::kUniform;
  std::vector<std::vector<double>> probs;  // kExplicit, one list per player
};

// Anchors for every player of `game` under `spec` and `seed`.
Profile make_anchors(const AnchorSpec& spec, const NormalFormGame& game,
                     std::uint64_t seed);

// Flat key = value settings. Lists are comma separated; '#' starts a comment.
// Keys absent from the file keep the defaults of the experiment kind.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kBlottoSweep;
  // Game specs understood by make_game; "random:N:A..B" expands to seeds A..B.
  std::vector<std::string> games;
  std::vector<double> lambdas;
  std::uint64_t T = 10'000;
  std::vector<std::uint64_t> seeds;
  EtaSpec eta;
  UpdateMode mode = UpdateMode::kExact;
  AnchorSpec anchor;
  std::string output;

  // blotto-sweep
  std::vector<SolverKind> baselines;
  EtaSpec baseline_eta;

  // mcts-eval
  std::uint64_t iterations = 50;
  std::vector<double> c_puct;
  std::size_t trees = 200;
  std::size_t branching = 3;
  std::size_t depth = 4;
  std::uint64_t match_games = 1000;
  double temperature = 1.0;
  TreeGameOptions tree_options;

  // qre-check
  std::uint64_t qre_max_iters = 100'000;
  double qre_damping = 0.5;

  // Effective settings in canonical form, output path excluded.
  std::map<std::string, std::string> settings() const;
  // FNV-1a 64 over the sorted "key=value" lines of settings(), as 16 hex
  // digits.
  std::string hash() const;
};

ExperimentConfig default_config(ExperimentKind kind);
// Throws ConfigError on unknown keys, malformed values or broken invariants.
// With `kind` set, the file's "experiment" key is optional but must agree.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "config",
                              std::optional<ExperimentKind> kind = std::nullopt);
ExperimentConfig parse_config_string(
    const std::string& text, std::optional<ExperimentKind> kind = std::nullopt);
ExperimentConfig load_config(const std::string& path,
                             std::optional<ExperimentKind> kind = std::nullopt);

// Formats with 9 significant digits; "nan" and "inf" spelled out.
std::string format_float(double x);

// ---- blotto-sweep

struct SweepRow {
  std::string solver;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t T = 0;
  // Mean over players of KL(average || anchor).
  double kl_to_anchor = 0.0;
  // Largest per-player best-response gain against the average profile.
  double exploitability = 0.0;
  // Largest per-player regularized regret.
  double regret = 0.0;
};

std::vector<SweepRow> blotto_sweep(const ExperimentConfig& config, int jobs = 1);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::string& config_hash);

// ---- verify-bounds

struct BoundRow {
  std::string game;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t T = 0;
  int player = 0;
  double kl_avg = 0.0;
  double regret = 0.0;
  double raw_regret = 0.0;
  double range = 0.0;
  double kl_bound = 0.0;
  bool kl_pass = false;
  // Nash-gap rows apply to two-player zero-sum games only.
  bool gap_applicable = false;
  double exploitability = 0.0;
  double beta = 0.0;
  double gap_bound = 0.0;
  double slack = 0.0;
  bool gap_pass = false;
  double eta = 0.0;
  double eta_limit = 0.0;
  bool eta_ok = false;
  // Regret bound for constant learning rates within eta_limit; NaN otherwise.
  double regret_bound = 0.0;
};

std::vector<BoundRow> verify_bounds(const ExperimentConfig& config, int jobs = 1);
void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows,
                      const std::string& config_hash);
void write_bounds_json(std::ostream& out, const std::vector<BoundRow>& rows,
                       const std::string& config_hash);
bool all_kl_bounds_pass(const std::vector<BoundRow>& rows);

// log|A|/eta + 3e(1 + log T)/(lambda eta) * (D + lambda beta + lambda sqrt|A|).
double regret_bound(std::size_t num_actions, double eta, double lambda,
                    double beta, double range, std::uint64_t T);

// ---- mcts-eval

struct MctsEvalRow {
  double c_puct = 0.0;
  std::uint64_t seed = 0;
  double agreement_anchor = 0.0;
  double agreement_minimax = 0.0;
  double winrate_vs_prior = 0.0;
  double std_error = 0.0;
  double prior_agreement_minimax = 0.0;
};

std::vector<MctsEvalRow> mcts_eval(const ExperimentConfig& config, int jobs = 1);
void write_mcts_eval_csv(std::ostream& out, const std::vector<MctsEvalRow>& rows,
                         const std::string& config_hash);

// The trees an mcts-eval run plays on for `seed`.
std::vector<TreeInstance> make_tree_corpus(const ExperimentConfig& config,
                                           std::uint64_t seed);

// ---- qre-check

struct QreRow {
  std::string game;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t T = 0;
  int player = 0;
  double linf_gap = 0.0;
  double qre_residual = 0.0;
};

struct QreReport {
  std::vector<QreRow> rows;
  // One line per skipped cell whose fixed-point oracle failed to converge.
  std::vector<std::string> skipped;
};

QreReport qre_check(const ExperimentConfig& config, int jobs = 1);
void write_qre_csv(std::ostream& out, const std::vector<QreRow>& rows,
                   const std::string& config_hash);

// Runs `config.kind`, writing CSV to `out_path` (stdout when empty) and, for
// verify-bounds, JSON to `json_path` when set. Returns the process exit code.
int run_experiment(const ExperimentConfig& config, const std::string& out_path,
                   int jobs, const std::string& json_path = {});

}  // namespace pikl

#endif  // PIKL_HARNESS_H_
