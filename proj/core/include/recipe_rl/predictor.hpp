#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "recipe_rl/grid.hpp"

namespace recipe_rl {

/// Color properties of a treated fabric: color strength k/s and CIELAB L, a, b.
struct ColorQuad {
  double ks = 0.0;
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;

  std::array<double, 4> asArray() const { return {ks, L, a, b}; }
  bool operator==(const ColorQuad&) const = default;
};

/// Black-box recipe -> color model that drives the reward. Implementations
/// must be deterministic and safe to call concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual ColorQuad predict(const ParameterGrid& grid, const GridState& state) const = 0;
  /// "reference" or "table"; echoed into reports.
  virtual std::string kind() const = 0;
};

using PredictorSource = std::shared_ptr<const Predictor>;

/// Undyed-to-faded color the reference surrogate interpolates between.
inline constexpr ColorQuad kOriginalColor{22.676, 64.97, 42.08, 88.04};

/// Fading depth in [0, 1) for raw recipe values (C, T, pH, t).
double fadingDepth(double C, double T, double pH, double t);

/// Color at a given fading depth; fadeColor(0) == kOriginalColor exactly.
ColorQuad fadeColor(double depth);

/// Analytic stand-in for a trained regression model over the four-parameter
/// ozonation recipe. Expects grid dims in the order C, T, pH, t.
class ReferenceSurrogate final : public Predictor {
 public:
  ColorQuad predict(const ParameterGrid& grid, const GridState& state) const override;
  std::string kind() const override { return "reference"; }
};

/// Predictions looked up per state index. Rows may be missing in memory;
/// asking for one throws IncompleteTableError.
class TablePredictor final : public Predictor {
 public:
  TablePredictor(const ParameterGrid& grid, std::vector<std::optional<ColorQuad>> rows);

  ColorQuad predict(const ParameterGrid& grid, const GridState& state) const override;
  std::string kind() const override { return "table"; }

  std::size_t missingCount() const noexcept { return missing_; }
  const std::vector<std::optional<ColorQuad>>& rows() const noexcept { return rows_; }

 private:
  std::string fingerprint_;
  std::vector<std::optional<ColorQuad>> rows_;
  std::size_t missing_ = 0;
};

PredictorSource makeReferenceSurrogate();

/// Every state mapped to the same color.
PredictorSource makeConstantPredictor(const ParameterGrid& grid, const ColorQuad& color);

struct TableLoadResult {
  std::shared_ptr<const TablePredictor> source;
  /// Rows that repeated an earlier state; the later row wins.
  std::size_t duplicateRows = 0;
};

/// Reads a prediction CSV (header: dim names then ks,L,a,b; raw parameter
/// values per row). Throws ParseError with the line number on malformed rows
/// and CoverageError when any grid state is left without a prediction.
TableLoadResult loadTable(const std::filesystem::path& path, const ParameterGrid& grid);

/// Writes one row per grid state, in state-index order.
void saveTable(const Predictor& predictor, const ParameterGrid& grid,
               const std::filesystem::path& path);

/// Target color plus per-component weights for the distance objective.
struct ObjectiveSpec {
  ColorQuad target;
  std::array<double, 4> weights{1.0, 1.0, 1.0, 1.0};

  /// Throws Error on non-finite target or negative/non-finite weights.
  void validate() const;
};

/// Weighted Euclidean distance sqrt(sum w_i (x_i - x'_i)^2).
double objective(const ObjectiveSpec& spec, const ColorQuad& predicted);

double evaluate(const Predictor& predictor, const ObjectiveSpec& spec, const ParameterGrid& grid,
                const GridState& state);

}  // namespace recipe_rl
