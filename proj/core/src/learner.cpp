#include "recipe_rl/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "recipe_rl/error.hpp"
#include "recipe_rl/numeric_text.hpp"

namespace recipe_rl {

void Hyperparameters::validate() const {
  if (episodes < 1) throw Error("episodes must be a positive integer");
  if (stepsPerEpisode < 1) throw Error("steps must be a positive integer");
  auto inUnit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!inUnit(learningRate)) throw Error("alpha must lie in [0, 1]");
  if (!inUnit(discount)) throw Error("gamma must lie in [0, 1]");
  if (!inUnit(epsilon)) throw Error("epsilon must lie in [0, 1]");
}

QTable::QTable(const ParameterGrid& grid)
    : QTable(grid.fingerprint(), grid.stateCount(), grid.actionCount()) {}

QTable::QTable(std::string fingerprint, std::size_t stateCount, std::size_t actionCount)
    : fingerprint_(std::move(fingerprint)),
      stateCount_(stateCount),
      actionCount_(actionCount),
      values_(stateCount * actionCount, 0.0) {}

double QTable::rowMax(StateIndex s) const {
  const auto r = row(s);
  return *std::max_element(r.begin(), r.end());
}

bool QTable::allFinite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ActionIndex greedyAction(const QTable& table, StateIndex state) {
  const auto r = table.row(state);
  // max_element returns the first maximum, i.e. the lowest index on ties.
  return static_cast<ActionIndex>(std::max_element(r.begin(), r.end()) - r.begin());
}

ActionIndex selectAction(const QTable& table, StateIndex state, double epsilon, Rng& rng) {
  if (rng.uniform01() < epsilon) {
    return static_cast<ActionIndex>(rng.below(table.actionCount()));
  }
  return greedyAction(table, state);
}

void updateQ(QTable& table, StateIndex s, ActionIndex a, double reward, StateIndex next,
             double alpha, double gamma) {
  double& q = table.at(s, a);
  const double target = reward + gamma * table.rowMax(next);
  q = q + alpha * (target - q);
  if (!std::isfinite(q)) {
    throw TrainingError("Q-value became non-finite at state " + std::to_string(s) +
                        ", action " + std::to_string(a));
  }
}

namespace {

struct BestTracker {
  StateIndex index = 0;
  double objective = std::numeric_limits<double>::infinity();
  bool any = false;

  void offer(StateIndex idx, double f) {
    if (!any || f < objective || (f == objective && idx < index)) {
      index = idx;
      objective = f;
      any = true;
    }
  }
};

}  // namespace

TrainingResult train(Environment& env, const Hyperparameters& hp) {
  if (hp.episodes < 0 || hp.stepsPerEpisode < 0) {
    throw Error("episodes and steps must be non-negative");
  }
  const auto started = std::chrono::steady_clock::now();
  const auto& grid = env.grid();
  QTable table(grid);
  Rng rng(hp.seed);

  std::vector<MoveAction> actions;
  actions.reserve(grid.actionCount());
  for (ActionIndex a = 0; a < grid.actionCount(); ++a) actions.push_back(grid.decodeAction(a));

  TrainingReport report;
  report.hyperparameters = hp;
  report.curve.reserve(static_cast<std::size_t>(hp.episodes));
  BestTracker best;

  auto withContext = [](int episode, int step, const std::exception& e) {
    return TrainingError("episode " + std::to_string(episode + 1) + ", step " +
                         std::to_string(step) + ": " + e.what());
  };

  if (hp.episodes == 0) {
    const GridState s0 = env.randomInitialState(rng);
    try {
      best.offer(grid.encodeState(s0), env.objectiveAt(s0));
    } catch (const std::exception& e) {
      throw withContext(0, 0, e);
    }
  }

  for (int e = 0; e < hp.episodes; ++e) {
    GridState s = env.randomInitialState(rng);
    StateIndex si = grid.encodeState(s);
    try {
      best.offer(si, env.objectiveAt(si));
    } catch (const std::exception& ex) {
      throw withContext(e, 0, ex);
    }
    EpisodeRecord rec;
    rec.episode = e + 1;
    for (int n = 0; n < hp.stepsPerEpisode; ++n) {
      const ActionIndex a = selectAction(table, si, hp.epsilon, rng);
      StepOutcome out;
      try {
        out = env.step(s, actions[a]);
      } catch (const std::exception& ex) {
        throw withContext(e, n + 1, ex);
      }
      const StateIndex next = out.blocked ? si : grid.encodeState(out.nextState);
      try {
        updateQ(table, si, a, out.reward, next, hp.learningRate, hp.discount);
      } catch (const std::exception& ex) {
        throw withContext(e, n + 1, ex);
      }
      rec.rewardSum += out.reward;
      if (out.blocked) {
        ++rec.blockedSteps;
      } else {
        best.offer(next, out.objectiveAfter);
      }
      s = std::move(out.nextState);
      si = next;
      ++report.totalSteps;
    }
    rec.bestObjective = best.objective;
    report.curve.push_back(rec);
  }

  report.bestState = grid.decodeState(best.index);
  report.bestObjective = best.objective;
  report.greedyState = report.bestState;
  report.greedyObjective = best.objective;
  report.wallSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(table), std::move(report)};
}

GridState extractRecommendation(const QTable& table, Environment& env, TrainingReport& report) {
  const auto& grid = env.grid();
  GridState s = report.bestState;
  std::unordered_set<StateIndex> seen{grid.encodeState(s)};
  const long long limit = 2LL * std::max(report.hyperparameters.stepsPerEpisode, 0);
  for (long long i = 0; i < limit; ++i) {
    const ActionIndex a = greedyAction(table, grid.encodeState(s));
    auto moved = grid.applyAction(s, grid.decodeAction(a));
    if (std::holds_alternative<OutOfBounds>(moved)) break;  // state repeats
    s = std::move(std::get<InBounds>(moved).next);
    if (!seen.insert(grid.encodeState(s)).second) break;
  }
  report.greedyState = s;
  report.greedyObjective = env.objectiveAt(s);
  return report.bestState;
}

std::string hyperparametersToJson(const Hyperparameters& hp) {
  return "{\"episodes\":" + std::to_string(hp.episodes) +
         ",\"steps\":" + std::to_string(hp.stepsPerEpisode) +
         ",\"alpha\":" + formatReal(hp.learningRate) + ",\"gamma\":" + formatReal(hp.discount) +
         ",\"epsilon\":" + formatReal(hp.epsilon) + ",\"seed\":" + std::to_string(hp.seed) + "}";
}

void saveQTable(const QTable& table, const Hyperparameters& hp,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write Q-table '" + path.string() + "'");
  out << table.fingerprint() << '\n' << hyperparametersToJson(hp) << '\n';
  std::string line;
  for (StateIndex s = 0; s < table.stateCount(); ++s) {
    line = std::to_string(s);
    for (double v : table.row(s)) {
      line += ',';
      line += formatReal(v);
    }
    line += '\n';
    out << line;
  }
  if (!out.flush()) throw Error("failed writing Q-table '" + path.string() + "'");
}

QTable loadQTable(const std::filesystem::path& path, const ParameterGrid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open Q-table '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("Q-table file is empty", 1);
  const std::string fileFingerprint(trim(line));
  if (fileFingerprint != grid.fingerprint()) {
    throw FingerprintMismatchError("Q-table grid " + fileFingerprint +
                                   " does not match configured grid " + grid.fingerprint());
  }
  if (!std::getline(in, line)) throw ParseError("missing hyperparameters line", 2);
  try {
    if (!nlohmann::json::parse(line).is_object()) throw ParseError("hyperparameters line is not an object", 2);
  } catch (const nlohmann::json::parse_error&) {
    throw ParseError("hyperparameters line is not valid JSON", 2);
  }

  QTable table(grid);
  std::vector<bool> seen(table.stateCount(), false);
  std::size_t lineNo = 2;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = splitFields(text);
    if (fields.size() != table.actionCount() + 1) {
      throw ParseError("expected " + std::to_string(table.actionCount() + 1) + " fields, got " +
                           std::to_string(fields.size()),
                       lineNo);
    }
    double idxValue = 0.0;
    if (!parseReal(fields[0], idxValue) || idxValue < 0 || idxValue != std::floor(idxValue) ||
        idxValue >= static_cast<double>(table.stateCount())) {
      throw ParseError("bad state index '" + std::string(fields[0]) + "'", lineNo);
    }
    const auto s = static_cast<StateIndex>(idxValue);
    if (seen[s]) throw ParseError("state " + std::to_string(s) + " appears twice", lineNo);
    seen[s] = true;
    auto row = table.row(s);
    for (std::size_t a = 0; a < table.actionCount(); ++a) {
      if (!parseReal(fields[a + 1], row[a]) || !std::isfinite(row[a])) {
        throw ParseError("bad Q-value '" + std::string(fields[a + 1]) + "'", lineNo);
      }
    }
    ++rows;
  }
  if (rows != table.stateCount()) {
    throw ParseError("Q-table has " + std::to_string(rows) + " rows, expected " +
                         std::to_string(table.stateCount()),
                     0);
  }
  return table;
}

}  // namespace recipe_rl
