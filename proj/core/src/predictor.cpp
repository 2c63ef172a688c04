#include "recipe_rl/predictor.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "recipe_rl/error.hpp"
#include "recipe_rl/numeric_text.hpp"

namespace recipe_rl {
namespace {

bool isFinite(const ColorQuad& q) {
  return std::isfinite(q.ks) && std::isfinite(q.L) && std::isfinite(q.a) && std::isfinite(q.b);
}

constexpr const char* kColorColumns[] = {"ks", "L", "a", "b"};

std::string expectedHeader(const ParameterGrid& grid) {
  std::string h;
  for (const auto& d : grid.dims()) h += d.name + ',';
  h += "ks,L,a,b";
  return h;
}

}  // namespace

double fadingDepth(double C, double T, double pH, double t) {
  const double c = C / 150.0;
  const double tau = T / 100.0;
  const double p = (pH - 1.0) / 13.0;
  const double theta = t / 60.0;
  return (1.0 - std::exp(-2.5 * theta)) * (0.2 + 0.8 * tau) *
         std::exp(-3.0 * (c - 0.65) * (c - 0.65)) *
         (0.6 + 0.4 * std::exp(-5.0 * (p - 0.55) * (p - 0.55)));
}

ColorQuad fadeColor(double depth) {
  return {kOriginalColor.ks * (1.0 - 0.95 * depth), kOriginalColor.L - 48.0 * depth,
          kOriginalColor.a - 21.0 * depth, kOriginalColor.b - 17.0 * depth};
}

ColorQuad ReferenceSurrogate::predict(const ParameterGrid& grid, const GridState& state) const {
  if (grid.dimCount() != 4) {
    throw Error("reference surrogate needs a 4-dimensional (C, T, pH, t) grid, got " +
                std::to_string(grid.dimCount()) + " dimensions");
  }
  if (!grid.isValid(state)) throw InvalidStateError("state not on grid");
  return fadeColor(fadingDepth(grid.rawValue(state, 0), grid.rawValue(state, 1),
                               grid.rawValue(state, 2), grid.rawValue(state, 3)));
}

TablePredictor::TablePredictor(const ParameterGrid& grid,
                               std::vector<std::optional<ColorQuad>> rows)
    : fingerprint_(grid.fingerprint()), rows_(std::move(rows)) {
  if (rows_.size() != grid.stateCount()) {
    throw Error("prediction table has " + std::to_string(rows_.size()) +
                " slots, grid has " + std::to_string(grid.stateCount()) + " states");
  }
  for (const auto& r : rows_) {
    if (!r) {
      ++missing_;
    } else if (!isFinite(*r)) {
      throw Error("prediction table contains a non-finite color");
    }
  }
}

ColorQuad TablePredictor::predict(const ParameterGrid& grid, const GridState& state) const {
  if (grid.stateCount() != rows_.size()) {
    throw Error("prediction table was built for a different grid");
  }
  const StateIndex idx = grid.encodeState(state);
  const auto& row = rows_[idx];
  if (!row) {
    throw IncompleteTableError("prediction table has no row for state " + grid.describe(state) +
                               " (index " + std::to_string(idx) + ")");
  }
  return *row;
}

PredictorSource makeReferenceSurrogate() { return std::make_shared<ReferenceSurrogate>(); }

PredictorSource makeConstantPredictor(const ParameterGrid& grid, const ColorQuad& color) {
  return std::make_shared<TablePredictor>(
      grid, std::vector<std::optional<ColorQuad>>(grid.stateCount(), color));
}

TableLoadResult loadTable(const std::filesystem::path& path, const ParameterGrid& grid) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open prediction table '" + path.string() + "'");

  const std::size_t dims = grid.dimCount();
  std::vector<std::optional<ColorQuad>> rows(grid.stateCount());
  std::size_t duplicates = 0;
  std::size_t lineNo = 0;
  bool sawHeader = false;
  std::string line;
  std::vector<double> values(dims + 4);

  while (std::getline(in, line)) {
    ++lineNo;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = splitFields(text);
    if (!sawHeader) {
      std::string joined;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) joined += ',';
        joined += fields[i];
      }
      if (joined != expectedHeader(grid)) {
        throw ParseError("expected header '" + expectedHeader(grid) + "', got '" + joined + "'",
                         lineNo);
      }
      sawHeader = true;
      continue;
    }
    if (fields.size() != dims + 4) {
      throw ParseError("expected " + std::to_string(dims + 4) + " fields, got " +
                       std::to_string(fields.size()),
                       lineNo);
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parseReal(fields[i], values[i]) || !std::isfinite(values[i])) {
        const std::string column =
            i < dims ? grid.dims()[i].name : std::string(kColorColumns[i - dims]);
        throw ParseError("bad number '" + std::string(fields[i]) + "' in column " + column,
                         lineNo);
      }
    }
    GridState state;
    try {
      state = grid.stateFromValues(std::span<const double>(values.data(), dims));
    } catch (const InvalidStateError& e) {
      throw ParseError(e.what(), lineNo);
    }
    auto& slot = rows[grid.encodeState(state)];
    if (slot) ++duplicates;
    slot = ColorQuad{values[dims], values[dims + 1], values[dims + 2], values[dims + 3]};
  }
  if (!sawHeader) throw ParseError("prediction table is empty", 0);

  std::size_t missing = 0;
  for (const auto& r : rows) missing += r ? 0 : 1;
  if (missing > 0) {
    throw CoverageError("prediction table '" + path.string() + "' is missing " +
                            std::to_string(missing) + " of " +
                            std::to_string(grid.stateCount()) + " grid states",
                        missing);
  }
  return {std::make_shared<TablePredictor>(grid, std::move(rows)), duplicates};
}

void saveTable(const Predictor& predictor, const ParameterGrid& grid,
               const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write prediction table '" + path.string() + "'");
  out << expectedHeader(grid) << '\n';
  for (StateIndex i = 0; i < grid.stateCount(); ++i) {
    const auto state = grid.decodeState(i);
    for (std::size_t d = 0; d < grid.dimCount(); ++d) {
      out << formatReal(grid.rawValue(state, d)) << ',';
    }
    const auto q = predictor.predict(grid, state);
    out << formatReal(q.ks) << ',' << formatReal(q.L) << ',' << formatReal(q.a) << ','
        << formatReal(q.b) << '\n';
  }
  if (!out.flush()) throw Error("failed writing prediction table '" + path.string() + "'");
}

void ObjectiveSpec::validate() const {
  if (!isFinite(target)) throw Error("objective target must be finite");
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error("objective weights must be finite and non-negative");
    }
  }
}

double objective(const ObjectiveSpec& spec, const ColorQuad& predicted) {
  const auto x = predicted.asArray();
  const auto y = spec.target.asArray();
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double d = x[i] - y[i];
    sum += spec.weights[i] * d * d;
  }
  return std::sqrt(sum);
}

double evaluate(const Predictor& predictor, const ObjectiveSpec& spec, const ParameterGrid& grid,
                const GridState& state) {
  return objective(spec, predictor.predict(grid, state));
}

}  // namespace recipe_rl
