#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace recipe_rl {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

/// One process parameter discretized into evenly spaced levels
/// min, min + step, ..., max (both ends inclusive).
struct ParameterDim {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  bool operator==(const ParameterDim&) const = default;
};

/// A lattice point, stored as one level index per dimension.
/// Instances handed out by ParameterGrid are always in range for that grid.
struct GridState {
  std::vector<int> levels;

  bool operator==(const GridState&) const = default;
};

/// Per-dimension move in grid-step units, each delta in {-1, 0, +1}.
struct MoveAction {
  std::vector<int> deltas;

  bool operator==(const MoveAction&) const = default;
};

/// Result of applying a move: the destination, or the number of dimensions
/// that would leave their range. An out-of-range move is rejected as a whole.
struct InBounds {
  GridState next;
};
struct OutOfBounds {
  int violationCount = 0;
};
using MoveResult = std::variant<InBounds, OutOfBounds>;

/// The discretized parameter space together with the dense state and action
/// encodings. State indices are mixed-radix with dimension 0 most significant;
/// action indices are base 3 with digit (delta + 1), dimension 0 most
/// significant. Immutable after construction.
class ParameterGrid {
 public:
  /// Throws InvalidGridError unless every dim has min <= max, step > 0 and a
  /// span that is an integer multiple of step.
  explicit ParameterGrid(std::vector<ParameterDim> dims);

  std::span<const ParameterDim> dims() const noexcept { return dims_; }
  std::size_t dimCount() const noexcept { return dims_.size(); }
  int levelCount(std::size_t dim) const { return levelCounts_.at(dim); }
  std::span<const int> levelCounts() const noexcept { return levelCounts_; }
  std::size_t stateCount() const noexcept { return stateCount_; }
  std::size_t actionCount() const noexcept { return actionCount_; }

  /// Index of the action whose deltas are all zero.
  ActionIndex holdAction() const noexcept { return (actionCount_ - 1) / 2; }

  bool isValid(const GridState& state) const noexcept;

  StateIndex encodeState(const GridState& state) const;
  GridState decodeState(StateIndex index) const;

  ActionIndex encodeAction(std::span<const int> deltas) const;
  ActionIndex encodeAction(const MoveAction& action) const {
    return encodeAction(action.deltas);
  }
  MoveAction decodeAction(ActionIndex index) const;

  MoveResult applyAction(const GridState& state, const MoveAction& action) const;

  /// Counts dimensions whose move would leave the range; 0 means in bounds.
  int violationCount(const GridState& state, const MoveAction& action) const;

  double rawValue(const GridState& state, std::size_t dim) const;
  std::vector<double> rawValues(const GridState& state) const;

  /// Maps physical values onto the lattice. Values must sit on a level to
  /// within a relative tolerance of 1e-9 of the step; otherwise throws
  /// InvalidStateError.
  GridState stateFromValues(std::span<const double> values) const;
  GridState stateFromLevels(std::vector<int> levels) const;

  /// Compact JSON description of the dims, used to tag persisted files.
  const std::string& fingerprint() const noexcept { return fingerprint_; }

  /// "C=100 T=60 pH=8 t=31"
  std::string describe(const GridState& state) const;

  bool operator==(const ParameterGrid& other) const { return dims_ == other.dims_; }

 private:
  std::vector<ParameterDim> dims_;
  std::vector<int> levelCounts_;
  std::size_t stateCount_ = 1;
  std::size_t actionCount_ = 1;
  std::string fingerprint_;
};

/// Water content C in [0, 150] step 50, temperature T in [0, 100] step 10,
/// pH in [1, 14] step 1, time t in [1, 60] step 1: 36960 states, 81 actions.
ParameterGrid defaultOzoneGrid();

/// Parses a JSON array of {"name", "min", "max", "step"} objects.
ParameterGrid gridFromJson(const std::string& text);
ParameterGrid loadGridFile(const std::filesystem::path& path);
std::string gridToJson(const ParameterGrid& grid);

}  // namespace recipe_rl
