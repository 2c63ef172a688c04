#include "recipe_rl/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "recipe_rl/error.hpp"
#include "recipe_rl/rng.hpp"

namespace recipe_rl {

double nearestRankQuantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error("quantile of an empty distribution");
  if (!(q >= 0.0 && q <= 1.0)) throw Error("quantile level must lie in [0, 1]");
  const auto n = static_cast<double>(sorted.size());
  const double rank = std::ceil(q * n);
  const auto idx = rank <= 1.0 ? std::size_t{0} : static_cast<std::size_t>(rank) - 1;
  return sorted[std::min(idx, sorted.size() - 1)];
}

double OracleResult::quantile(double q) const {
  if (!distribution.empty()) return nearestRankQuantile(distribution, q);
  for (const auto& [level, value] : quantiles) {
    if (level == q) return value;
  }
  throw Error("full distribution not retained; only the standard quantiles are available");
}

double OracleResult::fractionBelow(double value) const {
  if (distribution.empty()) throw Error("full distribution not retained");
  const auto it = std::lower_bound(distribution.begin(), distribution.end(), value);
  return static_cast<double>(it - distribution.begin()) /
         static_cast<double>(distribution.size());
}

OracleResult bruteForce(const ParameterGrid& grid, const Predictor& predictor,
                        const ObjectiveSpec& spec, unsigned threads) {
  spec.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = grid.stateCount();
  std::vector<double> values(n);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 1024)));

  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned w) {
    const std::size_t begin = n * w / threads;
    const std::size_t end = n * (w + 1) / threads;
    try {
      for (StateIndex i = begin; i < end; ++i) {
        values[i] = evaluate(predictor, spec, grid, grid.decodeState(i));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // First minimum in index order, so ties resolve to the lowest index.
  const auto best = std::min_element(values.begin(), values.end());

  OracleResult result;
  result.optimumIndex = static_cast<StateIndex>(best - values.begin());
  result.optimum = grid.decodeState(result.optimumIndex);
  result.optimumObjective = *best;
  result.evaluationCount = n;

  std::sort(values.begin(), values.end());
  for (double q : kReportQuantiles) result.quantiles.emplace_back(q, nearestRankQuantile(values, q));
  if (n <= kFullDistributionLimit) result.distribution = std::move(values);

  result.wallSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

SearchResult randomSearch(const ParameterGrid& grid, const Predictor& predictor,
                          const ObjectiveSpec& spec, std::size_t budget, std::uint64_t seed,
                          Sampling mode) {
  if (budget == 0) throw Error("random search budget must be at least 1");
  spec.validate();
  Rng rng(seed);
  const std::size_t n = grid.stateCount();

  std::vector<StateIndex> pool;
  if (mode == Sampling::WithoutReplacement) {
    budget = std::min(budget, n);
    pool.resize(n);
    std::iota(pool.begin(), pool.end(), StateIndex{0});
  }

  SearchResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < budget; ++k) {
    StateIndex idx;
    if (mode == Sampling::WithReplacement) {
      idx = static_cast<StateIndex>(rng.below(n));
    } else {
      // Partial Fisher-Yates: slot k receives a uniform pick from the rest.
      const auto j = k + static_cast<std::size_t>(rng.below(n - k));
      std::swap(pool[k], pool[j]);
      idx = pool[k];
    }
    const auto state = grid.decodeState(idx);
    const double f = evaluate(predictor, spec, grid, state);
    ++best.evaluations;
    if (f < best.objective) {
      best.objective = f;
      best.state = state;
    }
  }
  return best;
}

SearchResult hillClimb(const ParameterGrid& grid, const Predictor& predictor,
                       const ObjectiveSpec& spec, const GridState& start) {
  spec.validate();
  if (!grid.isValid(start)) throw InvalidStateError("hill climb start is not on the grid");

  std::vector<MoveAction> moves;
  for (ActionIndex a = 0; a < grid.actionCount(); ++a) {
    if (a != grid.holdAction()) moves.push_back(grid.decodeAction(a));
  }

  SearchResult result;
  result.state = start;
  result.objective = evaluate(predictor, spec, grid, start);
  result.evaluations = 1;
  while (true) {
    GridState bestNext;
    double bestF = std::numeric_limits<double>::infinity();
    for (const auto& m : moves) {
      auto moved = grid.applyAction(result.state, m);
      auto* in = std::get_if<InBounds>(&moved);
      if (!in) continue;
      const double f = evaluate(predictor, spec, grid, in->next);
      ++result.evaluations;
      if (f < bestF) {
        bestF = f;
        bestNext = std::move(in->next);
      }
    }
    if (!(bestF < result.objective)) break;
    result.state = std::move(bestNext);
    result.objective = bestF;
    ++result.iterations;
  }
  return result;
}

}  // namespace recipe_rl
