#include "recipe_rl/grid.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "recipe_rl/error.hpp"
#include "recipe_rl/numeric_text.hpp"

namespace recipe_rl {
namespace {

constexpr double kLatticeTolerance = 1e-9;

int countLevels(const ParameterDim& dim) {
  if (dim.name.empty()) throw InvalidGridError("dimension with empty name");
  if (!std::isfinite(dim.min) || !std::isfinite(dim.max) || !std::isfinite(dim.step)) {
    throw InvalidGridError("dimension '" + dim.name + "': non-finite bound or step");
  }
  if (dim.step <= 0.0) {
    throw InvalidGridError("dimension '" + dim.name + "': step must be positive");
  }
  if (dim.min > dim.max) {
    throw InvalidGridError("dimension '" + dim.name + "': min exceeds max");
  }
  const double spans = (dim.max - dim.min) / dim.step;
  const double rounded = std::round(spans);
  if (std::abs(spans - rounded) > kLatticeTolerance * std::max(1.0, rounded)) {
    throw InvalidGridError("dimension '" + dim.name +
                           "': range is not an integer multiple of step");
  }
  if (rounded + 1.0 > static_cast<double>(std::numeric_limits<int>::max())) {
    throw InvalidGridError("dimension '" + dim.name + "': too many levels");
  }
  return static_cast<int>(rounded) + 1;
}

}  // namespace

ParameterGrid::ParameterGrid(std::vector<ParameterDim> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvalidGridError("grid needs at least one dimension");
  std::set<std::string> names;
  for (const auto& d : dims_) {
    if (!names.insert(d.name).second) {
      throw InvalidGridError("duplicate dimension name '" + d.name + "'");
    }
  }
  levelCounts_.reserve(dims_.size());
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  for (const auto& d : dims_) {
    const int n = countLevels(d);
    levelCounts_.push_back(n);
    if (stateCount_ > kMax / static_cast<std::size_t>(n)) {
      throw InvalidGridError("state space too large");
    }
    stateCount_ *= static_cast<std::size_t>(n);
    if (actionCount_ > kMax / 3) throw InvalidGridError("action space too large");
    actionCount_ *= 3;
  }

  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    if (i) os << ',';
    os << "{\"name\":" << nlohmann::json(d.name).dump() << ",\"min\":" << formatReal(d.min)
       << ",\"max\":" << formatReal(d.max) << ",\"step\":" << formatReal(d.step) << '}';
  }
  os << ']';
  fingerprint_ = os.str();
}

bool ParameterGrid::isValid(const GridState& state) const noexcept {
  if (state.levels.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (state.levels[i] < 0 || state.levels[i] >= levelCounts_[i]) return false;
  }
  return true;
}

StateIndex ParameterGrid::encodeState(const GridState& state) const {
  if (state.levels.size() != dims_.size()) {
    throw InvalidStateError("state has " + std::to_string(state.levels.size()) +
                            " levels, grid has " + std::to_string(dims_.size()) +
                            " dimensions");
  }
  StateIndex idx = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const int l = state.levels[i];
    if (l < 0 || l >= levelCounts_[i]) {
      throw InvalidStateError("level " + std::to_string(l) + " out of range for '" +
                              dims_[i].name + "' (levels 0.." +
                              std::to_string(levelCounts_[i] - 1) + ")");
    }
    idx = idx * static_cast<StateIndex>(levelCounts_[i]) + static_cast<StateIndex>(l);
  }
  return idx;
}

GridState ParameterGrid::decodeState(StateIndex index) const {
  if (index >= stateCount_) {
    throw InvalidIndexError("state index " + std::to_string(index) + " >= state count " +
                            std::to_string(stateCount_));
  }
  GridState s;
  s.levels.resize(dims_.size());
  for (std::size_t i = dims_.size(); i-- > 0;) {
    const auto n = static_cast<StateIndex>(levelCounts_[i]);
    s.levels[i] = static_cast<int>(index % n);
    index /= n;
  }
  return s;
}

ActionIndex ParameterGrid::encodeAction(std::span<const int> deltas) const {
  if (deltas.size() != dims_.size()) {
    throw InvalidActionError("action has " + std::to_string(deltas.size()) +
                             " deltas, grid has " + std::to_string(dims_.size()) +
                             " dimensions");
  }
  ActionIndex idx = 0;
  for (int d : deltas) {
    if (d < -1 || d > 1) {
      throw InvalidActionError("delta " + std::to_string(d) + " outside {-1, 0, +1}");
    }
    idx = idx * 3 + static_cast<ActionIndex>(d + 1);
  }
  return idx;
}

MoveAction ParameterGrid::decodeAction(ActionIndex index) const {
  if (index >= actionCount_) {
    throw InvalidIndexError("action index " + std::to_string(index) + " >= action count " +
                            std::to_string(actionCount_));
  }
  MoveAction a;
  a.deltas.resize(dims_.size());
  for (std::size_t i = dims_.size(); i-- > 0;) {
    a.deltas[i] = static_cast<int>(index % 3) - 1;
    index /= 3;
  }
  return a;
}

int ParameterGrid::violationCount(const GridState& state, const MoveAction& action) const {
  if (!isValid(state)) throw InvalidStateError("state not on grid");
  if (action.deltas.size() != dims_.size()) {
    throw InvalidActionError("action dimension mismatch");
  }
  int violations = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const int next = state.levels[i] + action.deltas[i];
    if (next < 0 || next >= levelCounts_[i]) ++violations;
  }
  return violations;
}

MoveResult ParameterGrid::applyAction(const GridState& state, const MoveAction& action) const {
  const int violations = violationCount(state, action);
  if (violations > 0) return OutOfBounds{violations};
  GridState next = state;
  for (std::size_t i = 0; i < dims_.size(); ++i) next.levels[i] += action.deltas[i];
  return InBounds{std::move(next)};
}

double ParameterGrid::rawValue(const GridState& state, std::size_t dim) const {
  const auto& d = dims_.at(dim);
  return d.min + static_cast<double>(state.levels.at(dim)) * d.step;
}

std::vector<double> ParameterGrid::rawValues(const GridState& state) const {
  if (!isValid(state)) throw InvalidStateError("state not on grid");
  std::vector<double> out(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = rawValue(state, i);
  return out;
}

GridState ParameterGrid::stateFromValues(std::span<const double> values) const {
  if (values.size() != dims_.size()) {
    throw InvalidStateError("expected " + std::to_string(dims_.size()) + " values, got " +
                            std::to_string(values.size()));
  }
  GridState s;
  s.levels.resize(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    const double pos = (values[i] - d.min) / d.step;
    const double level = std::round(pos);
    if (!std::isfinite(pos) || std::abs(pos - level) > kLatticeTolerance * std::max(1.0, std::abs(level)) ||
        level < 0.0 || level >= static_cast<double>(levelCounts_[i])) {
      throw InvalidStateError("value " + formatReal(values[i]) + " is not a level of '" +
                              d.name + "' [" + formatReal(d.min) + ", " + formatReal(d.max) +
                              "] step " + formatReal(d.step));
    }
    s.levels[i] = static_cast<int>(level);
  }
  return s;
}

GridState ParameterGrid::stateFromLevels(std::vector<int> levels) const {
  GridState s{std::move(levels)};
  encodeState(s);  // validates
  return s;
}

std::string ParameterGrid::describe(const GridState& state) const {
  std::string out;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) out += ' ';
    out += dims_[i].name + '=' + formatReal(rawValue(state, i));
  }
  return out;
}

ParameterGrid defaultOzoneGrid() {
  return ParameterGrid({
      {"C", 0.0, 150.0, 50.0},
      {"T", 0.0, 100.0, 10.0},
      {"pH", 1.0, 14.0, 1.0},
      {"t", 1.0, 60.0, 1.0},
  });
}

ParameterGrid gridFromJson(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("grid config: ") + e.what(), 0);
  }
  if (!doc.is_array()) throw ParseError("grid config: expected a JSON array of dimensions", 0);
  std::vector<ParameterDim> dims;
  for (const auto& item : doc) {
    if (!item.is_object()) throw ParseError("grid config: dimension must be an object", 0);
    for (const auto& [key, _] : item.items()) {
      if (key != "name" && key != "min" && key != "max" && key != "step") {
        throw ParseError("grid config: unknown key '" + key + "'", 0);
      }
    }
    try {
      dims.push_back({item.at("name").get<std::string>(), item.at("min").get<double>(),
                      item.at("max").get<double>(), item.at("step").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("grid config: ") + e.what(), 0);
    }
  }
  return ParameterGrid(std::move(dims));
}

ParameterGrid loadGridFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open grid config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return gridFromJson(buf.str());
}

std::string gridToJson(const ParameterGrid& grid) { return grid.fingerprint(); }

}  // namespace recipe_rl
