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

// Command-line front end for the pikl experiments.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pikl/harness.h"
#include "pikl/kernels.h"
#include "pikl/mcts.h"
#include "pikl/toy_games.h"

namespace {

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::string json;
  int jobs = 1;
};

void add_experiment(CLI::App& app, const std::string& name,
                    const std::string& description, ExperimentArgs& args,
                    bool with_json) {
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--config", args.config, "Key = value experiment file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", args.out, "CSV destination (default: config's output, else stdout)");
  sub->add_option("--jobs", args.jobs, "Worker threads for independent cells")
      ->check(CLI::PositiveNumber);
  if (with_json) sub->add_option("--json", args.json, "Also write the report as JSON");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KL-regularized search experiments"};
  app.require_subcommand(1);

  ExperimentArgs args;
  add_experiment(app, "blotto-sweep", "Blotto lambda sweep with RM/Hedge baselines", args, false);
  add_experiment(app, "verify-bounds", "Check the regularized-regret bounds run by run", args, true);
  add_experiment(app, "mcts-eval", "Prior-regularized MCTS on synthetic trees", args, false);
  add_experiment(app, "qre-check", "Compare piKL self-play to the anchored QRE", args, false);

  std::string game_spec;
  CLI::App* dump = app.add_subcommand("dump-game", "Print a normal-form game as JSON");
  dump->add_option("--game", game_spec, "rps, pennies, blotto:C:F or random:N:SEED")->required();

  std::size_t branching = 3;
  std::size_t depth = 4;
  std::uint64_t tree_seed = 1;
  pikl::SearchConfig search;
  CLI::App* root = app.add_subcommand("search", "Run one search on a synthetic tree; print root stats");
  root->add_option("--branching", branching);
  root->add_option("--depth", depth);
  root->add_option("--tree-seed", tree_seed);
  root->add_option("--iterations", search.iterations)->check(CLI::PositiveNumber);
  root->add_option("--c-puct", search.c_puct);

  app.add_subcommand("isa", "Print the active vector kernel set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "dump-game") {
      std::cout << pikl::game_to_json(pikl::make_game(game_spec)).dump(2) << '\n';
      return 0;
    }
    if (name == "search") {
      const pikl::TreeInstance inst = pikl::make_tree_game(branching, depth, tree_seed);
      const pikl::MctsTree tree = pikl::run_search(inst, 0, search);
      pikl::write_root_stats_csv(std::cout, tree.root());
      return 0;
    }
    if (name == "isa") {
      std::cout << pikl::kernels::isa_name(pikl::kernels::active_isa()) << '\n';
      return 0;
    }
    pikl::ExperimentConfig config;
    try {
      config = pikl::load_config(args.config, pikl::parse_experiment(name));
    } catch (const pikl::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
    }
    return pikl::run_experiment(config, args.out, args.jobs, args.json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
