#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "recipe_rl/env.hpp"
#include "recipe_rl/error.hpp"
#include "recipe_rl/grid.hpp"
#include "recipe_rl/numeric_text.hpp"

namespace recipe_rl::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const std::map<std::string, Command> kCommands = {
    {"train", Command::Train},
    {"oracle", Command::Oracle},
    {"random-search", Command::RandomSearch},
    {"hill-climb", Command::HillClimb},
    {"recommend", Command::Recommend},
};

// Keys accepted in a --config file; each mirrors the flag of the same name.
const char* const kFileKeys[] = {"command", "grid",   "predictor", "target", "weights",
                                 "episodes", "steps", "alpha",     "gamma",  "epsilon",
                                 "seed",     "seeds", "report",    "curve",  "qtable",
                                 "budget",   "sampling", "start",  "threads"};

double parseRealFlag(const std::string& text, const std::string& flag) {
  double v = 0.0;
  if (!parseReal(text, v) || !std::isfinite(v)) {
    throw ConfigError(flag + ": '" + text + "' is not a finite number");
  }
  return v;
}

std::uint64_t parseUnsignedFlag(const std::string& text, const std::string& flag) {
  const auto t = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(flag + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

int parsePositiveIntFlag(const std::string& text, const std::string& flag) {
  const auto v = parseUnsignedFlag(text, flag);
  if (v < 1 || v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw ConfigError(flag + ": must be a positive integer, got '" + text + "'");
  }
  return static_cast<int>(v);
}

double parseUnitFlag(const std::string& text, const std::string& flag) {
  const double v = parseRealFlag(text, flag);
  if (v < 0.0 || v > 1.0) throw ConfigError(flag + ": " + text + " is outside [0, 1]");
  return v;
}

SeedRange parseSeedRange(const std::string& text, const std::string& flag) {
  const auto pos = text.find("..");
  if (pos == std::string::npos) throw ConfigError(flag + ": expected 'a..b', got '" + text + "'");
  SeedRange r{parseUnsignedFlag(text.substr(0, pos), flag),
              parseUnsignedFlag(text.substr(pos + 2), flag)};
  if (r.last < r.first) throw ConfigError(flag + ": empty range '" + text + "'");
  return r;
}

std::vector<double> parseReals(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (auto field : splitFields(text)) out.push_back(parseRealFlag(std::string(field), flag));
  return out;
}

// A config-file value rendered as the text its flag would carry.
std::string fileValueAsText(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return formatReal(v.get<double>());
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      if (!v[i].is_number()) throw ConfigError("config field '" + key + "': expected numbers");
      out += formatReal(v[i].get<double>());
    }
    return out;
  }
  throw ConfigError("config field '" + key + "': unsupported value " + v.dump());
}

std::string quadText(const std::array<double, 4>& q) {
  return formatReal(q[0]) + ',' + formatReal(q[1]) + ',' + formatReal(q[2]) + ',' +
         formatReal(q[3]);
}

json stateJson(const ParameterGrid& grid, const GridState& s) {
  json j = json::object();
  for (std::size_t i = 0; i < grid.dimCount(); ++i) j[grid.dims()[i].name] = grid.rawValue(s, i);
  return j;
}

// Output files are written beside their destination and renamed into place
// only once every one of them succeeded.
class OutputTransaction {
 public:
  OutputTransaction() = default;
  OutputTransaction(const OutputTransaction&) = delete;
  OutputTransaction& operator=(const OutputTransaction&) = delete;
  ~OutputTransaction() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& [tmp, _] : files_) fs::remove(tmp, ec);
  }

  fs::path stage(const fs::path& finalPath) {
    fs::path tmp = finalPath;
    tmp += ".partial";
    files_.emplace_back(tmp, finalPath);
    return tmp;
  }

  void writeText(const fs::path& finalPath, const std::string& text) {
    const auto tmp = stage(finalPath);
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write '" + finalPath.string() + "'");
    out << text;
    if (!out.flush()) throw Error("failed writing '" + finalPath.string() + "'");
  }

  void commit() {
    for (const auto& [tmp, dest] : files_) fs::rename(tmp, dest);
    committed_ = true;
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> files_;
  bool committed_ = false;
};

fs::path withSeedSuffix(const fs::path& p, std::uint64_t seed) {
  fs::path out = p.parent_path() / p.stem();
  out += ".seed" + std::to_string(seed);
  out += p.extension();
  return out;
}

struct Instance {
  ParameterGrid grid;
  PredictorSource predictor;
  ObjectiveSpec spec;
};

Instance buildInstance(const RunConfig& cfg, std::ostream& err) {
  ParameterGrid grid = cfg.gridPath ? loadGridFile(*cfg.gridPath) : defaultOzoneGrid();
  PredictorSource predictor;
  if (cfg.predictor == "reference") {
    predictor = makeReferenceSurrogate();
    // Fail early instead of on the first prediction.
    predictor->predict(grid, grid.decodeState(0));
  } else {
    const auto loaded = loadTable(cfg.predictor.substr(6), grid);
    if (loaded.duplicateRows > 0) {
      err << "warning: " << loaded.duplicateRows
          << " duplicate prediction rows; the last occurrence of each state was kept\n";
    }
    predictor = loaded.source;
  }
  ObjectiveSpec spec{cfg.target, cfg.weights};
  spec.validate();
  return {std::move(grid), std::move(predictor), spec};
}

std::string curveCsv(const TrainingReport& report) {
  std::string out = "episode,best_f,episode_reward,blocked_steps\n";
  for (const auto& r : report.curve) {
    out += std::to_string(r.episode) + ',' + formatReal(r.bestObjective) + ',' +
           formatReal(r.rewardSum) + ',' + std::to_string(r.blockedSteps) + '\n';
  }
  return out;
}

json trainingJson(const ParameterGrid& grid, const TrainingReport& r) {
  json j;
  j["seed"] = r.hyperparameters.seed;
  j["best_state"] = stateJson(grid, r.bestState);
  j["best_state_index"] = grid.encodeState(r.bestState);
  j["best_objective"] = r.bestObjective;
  j["greedy_state"] = stateJson(grid, r.greedyState);
  j["greedy_objective"] = r.greedyObjective;
  j["episodes"] = r.curve.size();
  j["total_steps"] = r.totalSteps;
  return j;
}

json oracleJson(const ParameterGrid& grid, const OracleResult& o) {
  json j;
  j["optimum"] = stateJson(grid, o.optimum);
  j["optimum_index"] = o.optimumIndex;
  j["optimum_objective"] = o.optimumObjective;
  json q = json::object();
  for (const auto& [level, value] : o.quantiles) q[formatReal(level)] = value;
  j["quantiles"] = q;
  j["evaluation_count"] = o.evaluationCount;
  return j;
}

TrainingResult runSeed(const Instance& inst, Hyperparameters hp) {
  Environment env(inst.grid, inst.predictor, inst.spec);
  auto result = train(env, hp);
  extractRecommendation(result.table, env, result.report);
  return result;
}

std::vector<TrainingResult> runSweep(const Instance& inst, const RunConfig& cfg) {
  std::vector<std::uint64_t> seeds;
  if (cfg.seeds) {
    for (auto s = cfg.seeds->first;; ++s) {
      seeds.push_back(s);
      if (s == cfg.seeds->last) break;
    }
  } else {
    seeds.push_back(cfg.hyperparameters.seed);
  }
  std::vector<std::optional<TrainingResult>> runs(seeds.size());
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, seeds.size()));

  // Static striping keeps the seed -> slot mapping independent of timing.
  std::vector<std::future<void>> futures;
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < seeds.size(); i += workers) {
        Hyperparameters hp = cfg.hyperparameters;
        hp.seed = seeds[i];
        runs[i] = runSeed(inst, hp);
      }
    }));
  }
  for (auto& f : futures) f.get();
  std::vector<TrainingResult> done;
  done.reserve(runs.size());
  for (auto& r : runs) done.push_back(std::move(*r));
  return done;
}

int runTraining(const RunConfig& cfg, const Instance& inst, std::ostream& out,
                OutputTransaction& tx, json& report) {
  auto runs = runSweep(inst, cfg);
  const bool sweep = cfg.seeds.has_value();

  json runsJson = json::array();
  std::size_t bestRun = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& rep = runs[i].report;
    runsJson.push_back(trainingJson(inst.grid, rep));
    if (rep.bestObjective < runs[bestRun].report.bestObjective) bestRun = i;

    if (cfg.curvePath) {
      tx.writeText(sweep ? withSeedSuffix(*cfg.curvePath, rep.hyperparameters.seed)
                         : *cfg.curvePath,
                   curveCsv(rep));
    }
    if (cfg.qtablePath) {
      const auto dest = sweep ? withSeedSuffix(*cfg.qtablePath, rep.hyperparameters.seed)
                              : *cfg.qtablePath;
      saveQTable(runs[i].table, rep.hyperparameters, tx.stage(dest));
    }
  }

  const auto& best = runs[bestRun].report;
  if (sweep) {
    report["runs"] = runsJson;
    report["result"] = runsJson[bestRun];
  } else {
    report["result"] = runsJson[0];
  }

  if (cfg.command == Command::Recommend) {
    const auto oracle = bruteForce(inst.grid, *inst.predictor, inst.spec, cfg.threads);
    const double share = oracle.distribution.empty() ? -1.0 : oracle.fractionBelow(best.bestObjective);
    report["oracle"] = oracleJson(inst.grid, oracle);
    report["recommendation"] = {
        {"state", stateJson(inst.grid, best.bestState)},
        {"objective", best.bestObjective},
        {"is_global_optimum", best.bestObjective == oracle.optimumObjective},
        {"fraction_of_states_better", share},
    };
    out << inst.grid.describe(best.bestState) << '\n';
    if (best.bestObjective != oracle.optimumObjective) {
      out << "# not the global optimum: objective " << formatReal(best.bestObjective)
          << " vs " << formatReal(oracle.optimumObjective) << " at "
          << inst.grid.describe(oracle.optimum) << "; " << formatReal(share * 100.0)
          << "% of states are better\n";
    }
  } else {
    out << "best " << inst.grid.describe(best.bestState) << " objective "
        << formatReal(best.bestObjective) << '\n';
  }
  return 0;
}

}  // namespace

std::string commandName(Command c) {
  for (const auto& [name, cmd] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

std::array<double, 4> parseQuad(const std::string& text, const std::string& what) {
  const auto values = parseReals(text, what);
  if (values.size() != 4) {
    throw ConfigError(what + ": expected four comma-separated numbers, got '" + text + "'");
  }
  return {values[0], values[1], values[2], values[3]};
}

RunConfig parseConfig(const std::vector<std::string>& args) {
  CLI::App app{"Q-learning recipe optimizer for discretized process parameters", "recipe-rl"};
  app.set_version_flag("--version", "recipe-rl 0.1.0");

  std::optional<std::string> command, configFile, grid, predictor, target, weights, episodes,
      steps, alpha, gamma, epsilon, seed, seeds, report, curve, qtable, budget, sampling, start,
      threads;
  app.add_option("command", command,
                 "train | oracle | random-search | hill-climb | recommend");
  app.add_option("--config", configFile, "JSON file with defaults for any flag below");
  app.add_option("--target", target, "target color k/s,L,a,b (required)");
  app.add_option("--weights", weights, "objective weights w1,w2,w3,w4 (default 1,1,1,1)");
  app.add_option("--grid", grid, "grid config JSON (default: built-in C,T,pH,t grid)");
  app.add_option("--predictor", predictor, "reference | table:<path>");
  app.add_option("--episodes", episodes, "training episodes E (default 100)");
  app.add_option("--steps", steps, "steps per episode N (default 1000)");
  app.add_option("--alpha", alpha, "learning rate (default 0.05)");
  app.add_option("--gamma", gamma, "discount factor (default 0.8)");
  app.add_option("--epsilon", epsilon, "probability of a random action (default 0.88)");
  app.add_option("--seed", seed, "RNG seed (default 0)");
  app.add_option("--seeds", seeds, "seed sweep a..b (inclusive), runs in parallel");
  app.add_option("--report", report, "report JSON output path");
  app.add_option("--curve", curve, "per-episode curve CSV output path");
  app.add_option("--qtable", qtable, "Q-table output path");
  app.add_option("--budget", budget, "random-search sample count (default 100000)");
  app.add_option("--sampling", sampling, "random-search: with-replacement | without-replacement");
  app.add_option("--start", start, "hill-climb start as raw values, e.g. 0,0,1,1");
  app.add_option("--threads", threads, "worker threads, 0 = all cores (default 0)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw ConfigError(app.help(), 0);
  } catch (const CLI::CallForVersion&) {
    throw ConfigError("recipe-rl 0.1.0", 0);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  json file = json::object();
  if (configFile) {
    std::ifstream in(*configFile);
    if (!in) throw ConfigError("--config: cannot open '" + *configFile + "'");
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("--config: " + std::string(e.what()));
    }
    if (!file.is_object()) throw ConfigError("--config: expected a JSON object");
    for (const auto& [key, _] : file.items()) {
      if (std::find(std::begin(kFileKeys), std::end(kFileKeys), key) == std::end(kFileKeys)) {
        throw ConfigError("--config: unknown field '" + key + "'");
      }
    }
  }

  // Flag beats file; the returned label names whichever supplied the value.
  auto resolve = [&](const std::optional<std::string>& flagValue,
                     const std::string& key) -> std::optional<std::pair<std::string, std::string>> {
    if (flagValue) return std::pair{*flagValue, "--" + key};
    if (file.contains(key) && !file[key].is_null()) {
      return std::pair{fileValueAsText(file[key], key), "config field '" + key + "'"};
    }
    return std::nullopt;
  };

  RunConfig cfg;
  if (configFile) cfg.configFile = *configFile;

  auto cmd = command ? std::optional<std::pair<std::string, std::string>>{{*command, "command"}}
                     : resolve(std::nullopt, "command");
  if (!cmd) throw ConfigError("missing command (train, oracle, random-search, hill-climb, recommend)");
  const auto it = kCommands.find(cmd->first);
  if (it == kCommands.end()) throw ConfigError(cmd->second + ": unknown command '" + cmd->first + "'");
  cfg.command = it->second;

  if (auto v = resolve(target, "target")) {
    const auto q = parseQuad(v->first, v->second);
    cfg.target = {q[0], q[1], q[2], q[3]};
  } else {
    throw ConfigError("--target is required (k/s,L,a,b)");
  }
  if (auto v = resolve(weights, "weights")) {
    cfg.weights = parseQuad(v->first, v->second);
    for (double w : cfg.weights) {
      if (w < 0.0) throw ConfigError(v->second + ": weights must be non-negative");
    }
  }
  if (auto v = resolve(grid, "grid")) cfg.gridPath = v->first;
  if (auto v = resolve(predictor, "predictor")) {
    if (v->first != "reference" && (v->first.rfind("table:", 0) != 0 || v->first.size() <= 6)) {
      throw ConfigError(v->second + ": expected 'reference' or 'table:<path>', got '" +
                        v->first + "'");
    }
    cfg.predictor = v->first;
  }

  auto& hp = cfg.hyperparameters;
  if (auto v = resolve(episodes, "episodes")) hp.episodes = parsePositiveIntFlag(v->first, v->second);
  if (auto v = resolve(steps, "steps")) hp.stepsPerEpisode = parsePositiveIntFlag(v->first, v->second);
  if (auto v = resolve(alpha, "alpha")) hp.learningRate = parseUnitFlag(v->first, v->second);
  if (auto v = resolve(gamma, "gamma")) hp.discount = parseUnitFlag(v->first, v->second);
  if (auto v = resolve(epsilon, "epsilon")) hp.epsilon = parseUnitFlag(v->first, v->second);
  if (auto v = resolve(seed, "seed")) hp.seed = parseUnsignedFlag(v->first, v->second);
  if (auto v = resolve(seeds, "seeds")) cfg.seeds = parseSeedRange(v->first, v->second);

  if (auto v = resolve(report, "report")) cfg.reportPath = v->first;
  if (auto v = resolve(curve, "curve")) cfg.curvePath = v->first;
  if (auto v = resolve(qtable, "qtable")) cfg.qtablePath = v->first;

  if (auto v = resolve(budget, "budget")) {
    cfg.budget = parseUnsignedFlag(v->first, v->second);
    if (cfg.budget < 1) throw ConfigError(v->second + ": budget must be at least 1");
  }
  if (auto v = resolve(sampling, "sampling")) {
    if (v->first == "with-replacement") {
      cfg.sampling = Sampling::WithReplacement;
    } else if (v->first == "without-replacement") {
      cfg.sampling = Sampling::WithoutReplacement;
    } else {
      throw ConfigError(v->second + ": expected with-replacement or without-replacement");
    }
  }
  if (auto v = resolve(start, "start")) cfg.start = parseReals(v->first, v->second);
  if (auto v = resolve(threads, "threads")) {
    const auto t = parseUnsignedFlag(v->first, v->second);
    if (t > 4096) throw ConfigError(v->second + ": too many threads");
    cfg.threads = static_cast<unsigned>(t);
  }

  if (cfg.seeds && cfg.command != Command::Train) {
    throw ConfigError("--seeds: only supported by the train command");
  }
  return cfg;
}

std::string configToJson(const RunConfig& cfg) {
  json j;
  j["command"] = commandName(cfg.command);
  j["grid"] = cfg.gridPath ? json(cfg.gridPath->string()) : json(nullptr);
  j["predictor"] = cfg.predictor;
  j["target"] = quadText(cfg.target.asArray());
  j["weights"] = quadText(cfg.weights);
  const auto& hp = cfg.hyperparameters;
  j["episodes"] = hp.episodes;
  j["steps"] = hp.stepsPerEpisode;
  j["alpha"] = hp.learningRate;
  j["gamma"] = hp.discount;
  j["epsilon"] = hp.epsilon;
  j["seed"] = hp.seed;
  j["seeds"] = cfg.seeds ? json(std::to_string(cfg.seeds->first) + ".." +
                                std::to_string(cfg.seeds->last))
                         : json(nullptr);
  j["report"] = cfg.reportPath ? json(cfg.reportPath->string()) : json(nullptr);
  j["curve"] = cfg.curvePath ? json(cfg.curvePath->string()) : json(nullptr);
  j["qtable"] = cfg.qtablePath ? json(cfg.qtablePath->string()) : json(nullptr);
  j["budget"] = cfg.budget;
  j["sampling"] =
      cfg.sampling == Sampling::WithReplacement ? "with-replacement" : "without-replacement";
  if (cfg.start) {
    std::string s;
    for (std::size_t i = 0; i < cfg.start->size(); ++i) {
      if (i) s += ',';
      s += formatReal((*cfg.start)[i]);
    }
    j["start"] = s;
  } else {
    j["start"] = nullptr;
  }
  j["threads"] = cfg.threads;
  return j.dump();
}

std::string stripWallTime(const std::string& reportJson) {
  auto j = json::parse(reportJson);
  j.erase("wall_time_seconds");
  return j.dump(2);
}

int runCommand(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  try {
    const Instance inst = buildInstance(cfg, err);
    OutputTransaction tx;

    json report;
    report["command"] = commandName(cfg.command);
    report["config"] = json::parse(configToJson(cfg));
    report["grid"] = json::parse(inst.grid.fingerprint());
    report["predictor"] = inst.predictor->kind();
    report["state_count"] = inst.grid.stateCount();
    report["action_count"] = inst.grid.actionCount();

    switch (cfg.command) {
      case Command::Train:
      case Command::Recommend:
        runTraining(cfg, inst, out, tx, report);
        break;
      case Command::Oracle: {
        const auto o = bruteForce(inst.grid, *inst.predictor, inst.spec, cfg.threads);
        report["result"] = oracleJson(inst.grid, o);
        out << "optimum " << inst.grid.describe(o.optimum) << " objective "
            << formatReal(o.optimumObjective) << '\n';
        break;
      }
      case Command::RandomSearch: {
        const auto r = randomSearch(inst.grid, *inst.predictor, inst.spec, cfg.budget,
                                    cfg.hyperparameters.seed, cfg.sampling);
        report["result"] = {{"best_state", stateJson(inst.grid, r.state)},
                            {"best_objective", r.objective},
                            {"evaluations", r.evaluations}};
        out << "best " << inst.grid.describe(r.state) << " objective " << formatReal(r.objective)
            << '\n';
        break;
      }
      case Command::HillClimb: {
        GridState startState;
        if (cfg.start) {
          startState = inst.grid.stateFromValues(*cfg.start);
        } else {
          Rng rng(cfg.hyperparameters.seed);
          startState = Environment(inst.grid, inst.predictor, inst.spec, false)
                           .randomInitialState(rng);
        }
        const auto r = hillClimb(inst.grid, *inst.predictor, inst.spec, startState);
        report["result"] = {{"start_state", stateJson(inst.grid, startState)},
                            {"state", stateJson(inst.grid, r.state)},
                            {"objective", r.objective},
                            {"iterations", r.iterations},
                            {"evaluations", r.evaluations}};
        out << "local optimum " << inst.grid.describe(r.state) << " objective "
            << formatReal(r.objective) << " after " << r.iterations << " moves\n";
        break;
      }
    }

    report["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (cfg.reportPath) tx.writeText(*cfg.reportPath, report.dump(2) + "\n");
    tx.commit();
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace recipe_rl::cli
