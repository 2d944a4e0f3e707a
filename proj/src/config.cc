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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "pikl/harness.h"
#include "pikl/rng.h"

namespace pikl {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("bad value for '" + key + "': '" + value + "' (expected " +
                    expected + ")");
}

double parse_double(const std::string& key, const std::string& text) {
  double x = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
    bad_value(key, text, "a finite number");
  }
  return x;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t x = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec == std::errc() && ptr == end) return x;
  // Allow integral scientific notation such as 1e5.
  const double d = parse_double(key, text);
  if (d < 0 || d != std::floor(d) || d > 1e18) {
    bad_value(key, text, "a nonnegative integer");
  }
  return static_cast<std::uint64_t>(d);
}

std::vector<double> parse_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
  if (out.empty()) bad_value(key, value, "a non-empty list");
  return out;
}

// Items are integers or inclusive ranges A..B.
std::vector<std::uint64_t> parse_uints(const std::string& key,
                                       const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(value)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_uint(key, item));
      continue;
    }
    const auto lo = parse_uint(key, trim(item.substr(0, dots)));
    const auto hi = parse_uint(key, trim(item.substr(dots + 2)));
    if (hi < lo || hi - lo > 1'000'000) bad_value(key, item, "a range A..B with A <= B");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) bad_value(key, value, "a non-empty list");
  return out;
}

// "random:N:A..B" expands into one spec per seed.
std::vector<std::string> parse_games(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& item : split_list(value)) {
    const auto dots = item.find("..");
    const auto colon = item.rfind(':');
    if (dots == std::string::npos || colon == std::string::npos || colon > dots) {
      out.push_back(item);
      continue;
    }
    const std::string prefix = item.substr(0, colon + 1);
    for (auto seed : parse_uints("game", item.substr(colon + 1))) {
      out.push_back(prefix + std::to_string(seed));
    }
  }
  if (out.empty()) bad_value("game", value, "a non-empty list");
  return out;
}

EtaSpec parse_eta(const std::string& key, const std::string& value) {
  EtaSpec spec;
  if (value == "theory") {
    spec.mode = EtaSpec::Mode::kTheory;
  } else if (value == "adaptive") {
    spec.mode = EtaSpec::Mode::kAdaptive;
    spec.value = kDefaultEtaScale;
  } else if (value.starts_with("adaptive:")) {
    spec.mode = EtaSpec::Mode::kAdaptive;
    spec.value = parse_double(key, value.substr(9));
  } else if (value.starts_with("constant:")) {
    spec.mode = EtaSpec::Mode::kConstant;
    spec.value = parse_double(key, value.substr(9));
  } else {
    spec.mode = EtaSpec::Mode::kConstant;
    spec.value = parse_double(key, value);
  }
  if (spec.mode != EtaSpec::Mode::kTheory && spec.value <= 0.0) {
    bad_value(key, value, "a positive learning rate");
  }
  return spec;
}

std::string eta_string(const EtaSpec& spec) {
  switch (spec.mode) {
    case EtaSpec::Mode::kTheory:
      return "theory";
    case EtaSpec::Mode::kAdaptive:
      return "adaptive:" + format_float(spec.value);
    case EtaSpec::Mode::kConstant:
      return "constant:" + format_float(spec.value);
  }
  return {};
}

AnchorSpec parse_anchor(const std::string& value) {
  AnchorSpec spec;
  if (value == "uniform") return spec;
  if (value == "random") {
    spec.kind = AnchorSpec::Kind::kRandom;
    return spec;
  }
  spec.kind = AnchorSpec::Kind::kExplicit;
  for (const auto& player : split_list(value, '/')) {
    std::vector<double> probs;
    std::istringstream in(player);
    std::string token;
    while (in >> token) {
      const double p = parse_double("anchor", token);
      if (p <= 0.0) bad_value("anchor", value, "positive probabilities");
      probs.push_back(p);
    }
    spec.probs.push_back(std::move(probs));
  }
  if (spec.probs.empty()) {
    bad_value("anchor", value, "uniform, random, or per-player lists 'p p / p p'");
  }
  return spec;
}

std::string anchor_string(const AnchorSpec& spec) {
  switch (spec.kind) {
    case AnchorSpec::Kind::kUniform:
      return "uniform";
    case AnchorSpec::Kind::kRandom:
      return "random";
    case AnchorSpec::Kind::kExplicit:
      break;
  }
  std::vector<std::string> players;
  for (const auto& probs : spec.probs) {
    std::vector<std::string> items;
    for (double p : probs) items.push_back(format_float(p));
    players.push_back(join(items, " "));
  }
  return join(players, " / ");
}

SolverKind parse_solver(const std::string& value) {
  if (value == "rm") return SolverKind::kRegretMatching;
  if (value == "hedge") return SolverKind::kHedge;
  if (value == "pikl") return SolverKind::kPikl;
  bad_value("baselines", value, "rm or hedge");
}

template <typename T>
std::string list_string(const std::vector<T>& items) {
  std::vector<std::string> parts;
  for (const auto& x : items) {
    if constexpr (std::is_floating_point_v<T>) {
      parts.push_back(format_float(x));
    } else {
      parts.push_back(std::to_string(x));
    }
  }
  return join(parts);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const auto* table = new std::map<std::string, Setter>{
      {"game", [](auto& c, const auto& v) { c.games = parse_games(v); }},
      {"lambda", [](auto& c, const auto& v) { c.lambdas = parse_doubles("lambda", v); }},
      {"T", [](auto& c, const auto& v) { c.T = parse_uint("T", v); }},
      {"seeds", [](auto& c, const auto& v) { c.seeds = parse_uints("seeds", v); }},
      {"eta", [](auto& c, const auto& v) { c.eta = parse_eta("eta", v); }},
      {"mode",
       [](auto& c, const auto& v) {
         if (v == "exact") {
           c.mode = UpdateMode::kExact;
         } else if (v == "sampled") {
           c.mode = UpdateMode::kSampled;
         } else {
           bad_value("mode", v, "sampled or exact");
         }
       }},
      {"anchor", [](auto& c, const auto& v) { c.anchor = parse_anchor(v); }},
      {"output", [](auto& c, const auto& v) { c.output = v; }},
      {"baselines",
       [](auto& c, const auto& v) {
         c.baselines.clear();
         if (v == "none") return;
         for (const auto& item : split_list(v)) c.baselines.push_back(parse_solver(item));
       }},
      {"baseline_eta",
       [](auto& c, const auto& v) { c.baseline_eta = parse_eta("baseline_eta", v); }},
      {"iterations",
       [](auto& c, const auto& v) { c.iterations = parse_uint("iterations", v); }},
      {"c_puct", [](auto& c, const auto& v) { c.c_puct = parse_doubles("c_puct", v); }},
      {"trees", [](auto& c, const auto& v) { c.trees = parse_uint("trees", v); }},
      {"branching",
       [](auto& c, const auto& v) { c.branching = parse_uint("branching", v); }},
      {"depth", [](auto& c, const auto& v) { c.depth = parse_uint("depth", v); }},
      {"match_games",
       [](auto& c, const auto& v) { c.match_games = parse_uint("match_games", v); }},
      {"temperature",
       [](auto& c, const auto& v) { c.temperature = parse_double("temperature", v); }},
      {"value_noise",
       [](auto& c, const auto& v) {
         c.tree_options.value_noise = parse_double("value_noise", v);
       }},
      {"anchor_concentration",
       [](auto& c, const auto& v) {
         c.tree_options.concentration = parse_double("anchor_concentration", v);
       }},
      {"anchor_noise",
       [](auto& c, const auto& v) {
         c.tree_options.anchor_noise = parse_double("anchor_noise", v);
       }},
      {"qre_max_iters",
       [](auto& c, const auto& v) { c.qre_max_iters = parse_uint("qre_max_iters", v); }},
      {"qre_damping",
       [](auto& c, const auto& v) { c.qre_damping = parse_double("qre_damping", v); }},
  };
  return *table;
}

void validate(const ExperimentConfig& c) {
  if (c.games.empty()) throw ConfigError("'game' must list at least one game");
  if (c.T < 1) throw ConfigError("T must be >= 1");
  if (c.seeds.empty()) throw ConfigError("'seeds' must not be empty");
  std::set<std::uint64_t> distinct(c.seeds.begin(), c.seeds.end());
  if (distinct.size() != c.seeds.size()) throw ConfigError("seeds must be distinct");
  for (double lambda : c.lambdas) {
    if (lambda < 0.0) throw ConfigError("lambda values must be >= 0");
    if (lambda == 0.0 && c.kind == ExperimentKind::kQreCheck) {
      throw ConfigError("qre-check needs lambda > 0");
    }
  }
  if (c.kind == ExperimentKind::kBlottoSweep && c.games.size() != 1) {
    throw ConfigError("blotto-sweep takes exactly one game");
  }
  if (c.kind != ExperimentKind::kMctsEval) {
    if (c.lambdas.empty()) throw ConfigError("'lambda' must not be empty");
    for (const auto& spec : c.games) {
      try {
        make_game(spec);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    if (c.kind != ExperimentKind::kBlottoSweep && c.mode != UpdateMode::kExact) {
      throw ConfigError(experiment_name(c.kind) + " requires mode = exact");
    }
  }
  if (c.kind == ExperimentKind::kMctsEval) {
    if (c.c_puct.empty()) throw ConfigError("'c_puct' must not be empty");
    for (double x : c.c_puct) {
      if (x <= 0.0) throw ConfigError("c_puct values must be > 0");
    }
    if (c.iterations < 1) throw ConfigError("iterations must be >= 1");
    if (c.trees < 1) throw ConfigError("trees must be >= 1");
    if (c.branching < 1 || c.depth < 1) {
      throw ConfigError("branching and depth must be >= 1");
    }
    if (std::pow(static_cast<double>(c.branching), static_cast<double>(c.depth)) >
        static_cast<double>(kTreeLeafLimit)) {
      throw ConfigError("tree too large: branching^depth exceeds " +
                        std::to_string(kTreeLeafLimit) + " leaves");
    }
    if (c.temperature < 0.0) throw ConfigError("temperature must be >= 0");
    if (c.tree_options.value_noise < 0.0 || c.tree_options.anchor_noise < 0.0) {
      throw ConfigError("noise levels must be >= 0");
    }
  }
  if (c.qre_damping <= 0.0 || c.qre_damping > 1.0) {
    throw ConfigError("qre_damping must lie in (0, 1]");
  }
}

}  // namespace

std::string format_float(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kBlottoSweep:
      return "blotto-sweep";
    case ExperimentKind::kVerifyBounds:
      return "verify-bounds";
    case ExperimentKind::kMctsEval:
      return "mcts-eval";
    case ExperimentKind::kQreCheck:
      return "qre-check";
  }
  return {};
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto kind : {ExperimentKind::kBlottoSweep, ExperimentKind::kVerifyBounds,
                    ExperimentKind::kMctsEval, ExperimentKind::kQreCheck}) {
    if (experiment_name(kind) == name) return kind;
  }
  bad_value("experiment", name,
            "blotto-sweep, verify-bounds, mcts-eval or qre-check");
}

Profile make_anchors(const AnchorSpec& spec, const NormalFormGame& game,
                     std::uint64_t seed) {
  Profile anchors;
  const int n = game.num_players();
  for (int p = 0; p < n; ++p) {
    const std::size_t k = game.num_actions(p);
    switch (spec.kind) {
      case AnchorSpec::Kind::kUniform:
        anchors.push_back(Policy::uniform(k));
        break;
      case AnchorSpec::Kind::kRandom: {
        Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(p)));
        std::vector<double> logits(k);
        for (double& z : logits) z = rng.normal();
        const double top = *std::max_element(logits.begin(), logits.end());
        for (double& z : logits) z = std::exp(z - top);
        anchors.push_back(Policy::normalized(std::move(logits)));
        break;
      }
      case AnchorSpec::Kind::kExplicit: {
        const auto& probs =
            spec.probs.size() == 1 ? spec.probs.front() : spec.probs.at(p);
        if (probs.size() != k) {
          throw ConfigError("anchor for player " + std::to_string(p) + " has " +
                            std::to_string(probs.size()) + " entries; game '" +
                            game.name() + "' has " + std::to_string(k) + " actions");
        }
        anchors.push_back(Policy::normalized(probs));
        break;
      }
    }
  }
  if (spec.kind == AnchorSpec::Kind::kExplicit && spec.probs.size() != 1 &&
      spec.probs.size() != static_cast<std::size_t>(n)) {
    throw ConfigError("anchor lists " + std::to_string(spec.probs.size()) +
                      " players; game '" + game.name() + "' has " +
                      std::to_string(n));
  }
  return anchors;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.seeds = {1, 2, 3};
  switch (kind) {
    case ExperimentKind::kBlottoSweep:
      c.games = {"blotto:10:3"};
      c.lambdas = {0.01, 0.1, 1.0, 10.0};
      c.T = 10'000;
      c.mode = UpdateMode::kSampled;
      c.baselines = {SolverKind::kRegretMatching, SolverKind::kHedge};
      break;
    case ExperimentKind::kVerifyBounds:
      c.games = parse_games("random:10:1..20");
      c.lambdas = {0.03, 0.1, 0.3, 1.0};
      c.T = 100'000;
      c.anchor.kind = AnchorSpec::Kind::kRandom;
      break;
    case ExperimentKind::kMctsEval:
      c.games = {"tree"};
      c.seeds = {1};
      c.c_puct = {1e-6, 0.5, 1.0, 2.0, 5.0, 10.0, 1e4};
      break;
    case ExperimentKind::kQreCheck:
      c.games = {"rps", "pennies"};
      c.lambdas = {0.3, 1.0};
      c.T = 100'000;
      c.anchor.kind = AnchorSpec::Kind::kRandom;
      break;
  }
  return c;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source,
                              std::optional<ExperimentKind> kind) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  std::string experiment;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    if (key == "experiment") {
      experiment = value;
    } else if (!setters().contains(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    } else {
      entries.emplace_back(std::move(key), std::move(value));
    }
  }
  if (experiment.empty()) {
    if (!kind) throw ConfigError(source + ": missing 'experiment'");
    experiment = experiment_name(*kind);
  }
  const ExperimentKind parsed = parse_experiment(experiment);
  if (kind && parsed != *kind) {
    throw ConfigError(source + ": config is for '" + experiment + "', not '" +
                      experiment_name(*kind) + "'");
  }
  ExperimentConfig config = default_config(parsed);
  for (const auto& [key, value] : entries) setters().at(key)(config, value);
  validate(config);
  return config;
}

ExperimentConfig parse_config_string(const std::string& text,
                                     std::optional<ExperimentKind> kind) {
  std::istringstream in(text);
  return parse_config(in, "config", kind);
}

ExperimentConfig load_config(const std::string& path,
                             std::optional<ExperimentKind> kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  return parse_config(in, path, kind);
}

std::map<std::string, std::string> ExperimentConfig::settings() const {
  std::map<std::string, std::string> s;
  s["experiment"] = experiment_name(kind);
  s["game"] = join(games);
  s["lambda"] = list_string(lambdas);
  s["T"] = std::to_string(T);
  s["seeds"] = list_string(seeds);
  s["eta"] = eta_string(eta);
  s["mode"] = mode == UpdateMode::kExact ? "exact" : "sampled";
  s["anchor"] = anchor_string(anchor);
  std::vector<std::string> names;
  for (auto kind : baselines) names.push_back(solver_name(kind));
  s["baselines"] = names.empty() ? "none" : join(names);
  s["baseline_eta"] = eta_string(baseline_eta);
  s["iterations"] = std::to_string(iterations);
  s["c_puct"] = list_string(c_puct);
  s["trees"] = std::to_string(trees);
  s["branching"] = std::to_string(branching);
  s["depth"] = std::to_string(depth);
  s["match_games"] = std::to_string(match_games);
  s["temperature"] = format_float(temperature);
  s["value_noise"] = format_float(tree_options.value_noise);
  s["anchor_concentration"] = format_float(tree_options.concentration);
  s["anchor_noise"] = format_float(tree_options.anchor_noise);
  s["qre_max_iters"] = std::to_string(qre_max_iters);
  s["qre_damping"] = format_float(qre_damping);
  return s;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, value] : settings()) {
    for (char ch : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pikl
