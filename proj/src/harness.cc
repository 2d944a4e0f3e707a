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

#include "pikl/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pikl/anchored.h"
#include "pikl/mcts.h"
#include "pikl/rng.h"

namespace pikl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kKlTolerance = 1e-9;

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Rethrows the first
// exception after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            next.store(n);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

SolverSpec pikl_spec(double lambda, const Policy& anchor, const EtaSpec& eta) {
  SolverSpec spec;
  // lambda = 0 is plain Hedge.
  spec.kind = lambda > 0.0 ? SolverKind::kPikl : SolverKind::kHedge;
  spec.lambda = lambda;
  spec.anchor = anchor;
  spec.eta = eta;
  return spec;
}

std::vector<SolverSpec> per_player(const NormalFormGame& game, SolverKind kind,
                                   double lambda, const Profile& anchors,
                                   const EtaSpec& eta) {
  std::vector<SolverSpec> specs;
  for (int p = 0; p < game.num_players(); ++p) {
    SolverSpec spec = kind == SolverKind::kPikl ? pikl_spec(lambda, anchors[p], eta)
                                                : SolverSpec{kind, 0.0, anchors[p], eta};
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::size_t argmax_lowest(std::span<const double> xs) {
  return static_cast<std::size_t>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

const char* flag(bool x) { return x ? "1" : "0"; }

}  // namespace

// ---- blotto-sweep

std::vector<SweepRow> blotto_sweep(const ExperimentConfig& config, int jobs) {
  const NormalFormGame game = make_game(config.games.front());
  struct Cell {
    SolverKind kind;
    double lambda;
    std::uint64_t seed;
  };
  std::vector<double> lambdas = config.lambdas;
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<Cell> cells;
  for (double lambda : lambdas) {
    for (auto seed : seeds) cells.push_back({SolverKind::kPikl, lambda, seed});
  }
  for (SolverKind kind : config.baselines) {
    for (auto seed : seeds) cells.push_back({kind, 0.0, seed});
  }

  std::vector<SweepRow> rows(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const Profile anchors = make_anchors(config.anchor, game, cell.seed);
    const EtaSpec& eta =
        cell.kind == SolverKind::kPikl ? config.eta : config.baseline_eta;
    SelfplayOptions options;
    options.iterations = config.T;
    options.mode = config.mode;
    options.seed = cell.seed;
    const SelfplayResult result = run_selfplay(
        game, per_player(game, cell.kind, cell.lambda, anchors, eta), options);
    SweepRow& row = rows[i];
    row.solver = solver_name(cell.kind);
    row.lambda = cell.lambda;
    row.seed = cell.seed;
    row.T = config.T;
    row.exploitability = exploitability(game, result.average).max_gap();
    row.regret = -std::numeric_limits<double>::infinity();
    for (const auto& p : result.players) {
      row.kl_to_anchor += p.kl_avg / static_cast<double>(result.players.size());
      row.regret = std::max(row.regret, p.regret);
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::string& config_hash) {
  out << "lambda,seed,T,kl_to_anchor,exploitability,regret,solver,config_hash\n";
  for (const auto& r : rows) {
    out << format_float(r.lambda) << ',' << r.seed << ',' << r.T << ','
        << format_float(r.kl_to_anchor) << ',' << format_float(r.exploitability)
        << ',' << format_float(r.regret) << ',' << r.solver << ',' << config_hash
        << '\n';
  }
}

// ---- verify-bounds

double regret_bound(std::size_t num_actions, double eta, double lambda,
                    double beta, double range, std::uint64_t T) {
  const double n = static_cast<double>(num_actions);
  return std::log(n) / eta +
         3.0 * std::numbers::e * (1.0 + std::log(static_cast<double>(T))) /
             (lambda * eta) * (range + lambda * beta + lambda * std::sqrt(n));
}

std::vector<BoundRow> verify_bounds(const ExperimentConfig& config, int jobs) {
  std::vector<NormalFormGame> games;
  for (const auto& spec : config.games) games.push_back(make_game(spec));
  struct Cell {
    std::size_t game;
    double lambda;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < games.size(); ++g) {
    for (double lambda : config.lambdas) {
      for (auto seed : config.seeds) cells.push_back({g, lambda, seed});
    }
  }

  std::vector<std::vector<BoundRow>> per_cell(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const NormalFormGame& game = games[cell.game];
    const Profile anchors = make_anchors(config.anchor, game, cell.seed);
    SelfplayOptions options;
    options.iterations = config.T;
    options.mode = config.mode;
    options.seed = cell.seed;
    const SelfplayResult result = run_selfplay(
        game, per_player(game, SolverKind::kPikl, cell.lambda, anchors, config.eta),
        options);
    const bool gap_applicable = game.num_players() == 2 && game.zero_sum();
    for (const CheckpointRow& c : result.trajectory) {
      const double range = game.range(c.player);
      BoundRow row;
      row.game = config.games[cell.game];
      row.lambda = cell.lambda;
      row.seed = cell.seed;
      row.T = c.t;
      row.player = c.player;
      row.kl_avg = c.kl_avg;
      row.regret = c.regret;
      row.raw_regret = c.raw_regret;
      row.range = range;
      row.beta = max_log_inverse(anchors[c.player]);
      if (cell.lambda > 0.0) {
        row.kl_bound = (c.regret / static_cast<double>(c.t) + range) / cell.lambda;
      } else {
        row.kl_bound = std::numeric_limits<double>::infinity();
      }
      row.kl_pass = c.kl_avg <= row.kl_bound + kKlTolerance;
      row.gap_applicable = gap_applicable;
      row.exploitability = c.exploitability;
      row.gap_bound = cell.lambda * row.beta;
      row.slack = 5.0 * range / std::sqrt(static_cast<double>(c.t));
      row.gap_pass =
          gap_applicable && c.exploitability <= row.gap_bound + row.slack;
      row.eta = c.eta;
      row.eta_limit = theory_eta(cell.lambda, row.beta, range);
      row.eta_ok = c.eta <= row.eta_limit * (1.0 + 1e-12);
      const bool constant_eta = config.eta.mode != EtaSpec::Mode::kAdaptive;
      row.regret_bound =
          row.eta_ok && constant_eta && cell.lambda > 0.0
              ? pikl::regret_bound(game.num_actions(c.player), c.eta, cell.lambda,
                                   row.beta, range, c.t)
              : kNaN;
      per_cell[i].push_back(row);
    }
  });
  std::vector<BoundRow> rows;
  for (auto& cell_rows : per_cell) {
    rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
  }
  return rows;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows,
                      const std::string& config_hash) {
  out << "game,lambda,seed,T,player,kl_avg,kl_bound,kl_pass,exploitability,"
         "beta,gap_bound,slack,gap_pass,eta,eta_limit,eta_ok,regret,"
         "regret_bound,raw_regret,config_hash\n";
  for (const auto& r : rows) {
    out << r.game << ',' << format_float(r.lambda) << ',' << r.seed << ',' << r.T
        << ',' << r.player << ',' << format_float(r.kl_avg) << ','
        << format_float(r.kl_bound) << ',' << flag(r.kl_pass) << ','
        << format_float(r.exploitability) << ',' << format_float(r.beta) << ','
        << format_float(r.gap_bound) << ',' << format_float(r.slack) << ','
        << (r.gap_applicable ? flag(r.gap_pass) : "na") << ','
        << format_float(r.eta) << ',' << format_float(r.eta_limit) << ','
        << flag(r.eta_ok) << ',' << format_float(r.regret) << ','
        << format_float(r.regret_bound) << ',' << format_float(r.raw_regret)
        << ',' << config_hash << '\n';
  }
}

void write_bounds_json(std::ostream& out, const std::vector<BoundRow>& rows,
                       const std::string& config_hash) {
  nlohmann::ordered_json doc;
  doc["config_hash"] = config_hash;
  doc["all_kl_bounds_pass"] = all_kl_bounds_pass(rows);
  auto& list = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["game"] = r.game;
    j["lambda"] = r.lambda;
    j["seed"] = r.seed;
    j["T"] = r.T;
    j["player"] = r.player;
    j["kl_avg"] = r.kl_avg;
    j["kl_bound"] = r.kl_bound;
    j["kl_pass"] = r.kl_pass;
    j["exploitability"] = r.exploitability;
    j["beta"] = r.beta;
    j["gap_bound"] = r.gap_bound;
    j["slack"] = r.slack;
    if (r.gap_applicable) {
      j["gap_pass"] = r.gap_pass;
    } else {
      j["gap_pass"] = nullptr;
    }
    j["eta"] = r.eta;
    j["eta_limit"] = r.eta_limit;
    j["eta_ok"] = r.eta_ok;
    j["regret"] = r.regret;
    j["regret_bound"] = r.regret_bound;
    j["raw_regret"] = r.raw_regret;
    list.push_back(std::move(j));
  }
  out << doc.dump(2) << '\n';
}

bool all_kl_bounds_pass(const std::vector<BoundRow>& rows) {
  return std::all_of(rows.begin(), rows.end(),
                     [](const BoundRow& r) { return r.kl_pass; });
}

// ---- mcts-eval

std::vector<TreeInstance> make_tree_corpus(const ExperimentConfig& config,
                                           std::uint64_t seed) {
  std::vector<TreeInstance> trees;
  trees.reserve(config.trees);
  for (std::size_t i = 0; i < config.trees; ++i) {
    trees.push_back(make_tree_game(config.branching, config.depth,
                                   derive_seed(seed, i), config.tree_options));
  }
  return trees;
}

std::vector<MctsEvalRow> mcts_eval(const ExperimentConfig& config, int jobs) {
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<double> c_values = config.c_puct;
  std::sort(c_values.begin(), c_values.end());

  std::vector<std::vector<TreeInstance>> corpora;
  std::vector<double> prior_agreement;
  for (auto seed : seeds) {
    corpora.push_back(make_tree_corpus(config, seed));
    std::size_t hits = 0;
    for (const auto& inst : corpora.back()) {
      hits += argmax_lowest(inst.anchor.at(0).probs()) == inst.best_move(0);
    }
    prior_agreement.push_back(static_cast<double>(hits) / config.trees);
  }

  std::vector<MctsEvalRow> rows(seeds.size() * c_values.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const std::size_t s = i / c_values.size();
    const double c = c_values[i % c_values.size()];
    const auto& trees = corpora[s];
    SearchConfig search;
    search.iterations = config.iterations;
    search.c_puct = c;
    std::size_t anchor_hits = 0;
    std::size_t minimax_hits = 0;
    for (const auto& inst : trees) {
      const MctsTree tree = run_search(inst, 0, search);
      const Policy pi = tree.root().total_visits() > 0
                            ? grill_policy(tree.root(), c)
                            : Policy(tree.root().prior);
      const std::size_t move = argmax_lowest(pi.probs());
      anchor_hits += move == argmax_lowest(inst.anchor.at(0).probs());
      minimax_hits += move == inst.best_move(0);
    }
    AgentSpec mcts;
    mcts.kind = AgentSpec::Kind::kMcts;
    mcts.c_puct = c;
    mcts.iterations = config.iterations;
    AgentSpec prior;
    prior.kind = AgentSpec::Kind::kPrior;
    const MatchResult match = play_match(trees, mcts, prior, config.match_games,
                                         config.temperature,
                                         derive_seed(seeds[s], 0x6d61746368));
    MctsEvalRow& row = rows[i];
    row.c_puct = c;
    row.seed = seeds[s];
    row.agreement_anchor = static_cast<double>(anchor_hits) / trees.size();
    row.agreement_minimax = static_cast<double>(minimax_hits) / trees.size();
    row.winrate_vs_prior = match.score;
    row.std_error = match.std_error;
    row.prior_agreement_minimax = prior_agreement[s];
  });
  return rows;
}

void write_mcts_eval_csv(std::ostream& out, const std::vector<MctsEvalRow>& rows,
                         const std::string& config_hash) {
  out << "c_puct,top1_agreement_with_anchor_argmax,top1_agreement_with_minimax,"
         "winrate_vs_prior,stderr,prior_top1_agreement_with_minimax,seed,"
         "config_hash\n";
  for (const auto& r : rows) {
    out << format_float(r.c_puct) << ',' << format_float(r.agreement_anchor) << ','
        << format_float(r.agreement_minimax) << ','
        << format_float(r.winrate_vs_prior) << ',' << format_float(r.std_error)
        << ',' << format_float(r.prior_agreement_minimax) << ',' << r.seed << ','
        << config_hash << '\n';
  }
}

// ---- qre-check

QreReport qre_check(const ExperimentConfig& config, int jobs) {
  std::vector<NormalFormGame> games;
  for (const auto& spec : config.games) games.push_back(make_game(spec));
  struct Cell {
    std::size_t game;
    double lambda;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < games.size(); ++g) {
    for (double lambda : config.lambdas) {
      for (auto seed : config.seeds) cells.push_back({g, lambda, seed});
    }
  }
  std::vector<std::vector<QreRow>> per_cell(cells.size());
  std::vector<std::string> skipped(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const NormalFormGame& game = games[cell.game];
    const Profile anchors = make_anchors(config.anchor, game, cell.seed);
    QreOptions qre_options;
    qre_options.max_iters = config.qre_max_iters;
    qre_options.damping = config.qre_damping;
    const QreResult qre = anchored_qre(game, anchors, cell.lambda, qre_options);
    if (!qre.converged) {
      std::ostringstream msg;
      msg << config.games[cell.game] << " lambda=" << format_float(cell.lambda)
          << " seed=" << cell.seed << ": fixed point not reached (residual "
          << format_float(qre.residual) << ")";
      skipped[i] = msg.str();
      return;
    }
    SelfplayOptions options;
    options.iterations = config.T;
    options.mode = UpdateMode::kExact;
    options.seed = cell.seed;
    const SelfplayResult result = run_selfplay(
        game, per_player(game, SolverKind::kPikl, cell.lambda, anchors, config.eta),
        options);
    for (int p = 0; p < game.num_players(); ++p) {
      QreRow row;
      row.game = config.games[cell.game];
      row.lambda = cell.lambda;
      row.seed = cell.seed;
      row.T = config.T;
      row.player = p;
      for (std::size_t a = 0; a < game.num_actions(p); ++a) {
        row.linf_gap = std::max(row.linf_gap,
                                std::abs(result.average[p][a] - qre.profile[p][a]));
      }
      row.qre_residual = qre.residual;
      per_cell[i].push_back(row);
    }
  });
  QreReport report;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    report.rows.insert(report.rows.end(), per_cell[i].begin(), per_cell[i].end());
    if (!skipped[i].empty()) report.skipped.push_back(skipped[i]);
  }
  return report;
}

void write_qre_csv(std::ostream& out, const std::vector<QreRow>& rows,
                   const std::string& config_hash) {
  out << "game,lambda,seed,T,player,linf_gap,qre_residual,config_hash\n";
  for (const auto& r : rows) {
    out << r.game << ',' << format_float(r.lambda) << ',' << r.seed << ',' << r.T
        << ',' << r.player << ',' << format_float(r.linf_gap) << ','
        << format_float(r.qre_residual) << ',' << config_hash << '\n';
  }
}

int run_experiment(const ExperimentConfig& config, const std::string& out_path,
                   int jobs, const std::string& json_path) {
  const std::string path = out_path.empty() ? config.output : out_path;
  std::ofstream file;
  if (!path.empty()) {
    file.open(path, std::ios::binary | std::ios::trunc);
    if (!file) {
      std::cerr << "error: cannot write '" << path << "'\n";
      return 2;
    }
  }
  std::ostream& out = path.empty() ? std::cout : file;
  const std::string hash = config.hash();
  int code = 0;
  switch (config.kind) {
    case ExperimentKind::kBlottoSweep:
      write_sweep_csv(out, blotto_sweep(config, jobs), hash);
      break;
    case ExperimentKind::kVerifyBounds: {
      const auto rows = verify_bounds(config, jobs);
      write_bounds_csv(out, rows, hash);
      if (!json_path.empty()) {
        std::ofstream json(json_path, std::ios::binary | std::ios::trunc);
        if (!json) {
          std::cerr << "error: cannot write '" << json_path << "'\n";
          return 2;
        }
        write_bounds_json(json, rows, hash);
      }
      if (!all_kl_bounds_pass(rows)) {
        std::cerr << "KL bound violated in at least one row\n";
        code = 1;
      }
      break;
    }
    case ExperimentKind::kMctsEval:
      write_mcts_eval_csv(out, mcts_eval(config, jobs), hash);
      break;
    case ExperimentKind::kQreCheck: {
      const QreReport report = qre_check(config, jobs);
      for (const auto& line : report.skipped) std::cerr << "skipped: " << line << '\n';
      write_qre_csv(out, report.rows, hash);
      break;
    }
  }
  out.flush();
  return code;
}

}  // namespace pikl
