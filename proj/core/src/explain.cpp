/*
 * Copyright 2026 The DAPr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dapr/explain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dapr/csv.hpp"
#include "dapr/error.hpp"
#include "dapr/rng.hpp"

namespace dapr {
namespace {

void CheckPrior(const Mlp& prior, std::size_t k) {
  if (prior.input_width() != k || prior.output_width() != 1) {
    throw ShapeError("prior maps " + std::to_string(prior.input_width()) + " -> " +
                     std::to_string(prior.output_width()) + " but the meta-feature matrix has " +
                     std::to_string(k) + " columns");
  }
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

Tensor SecondOrderExplanations(const Mlp& prior, const MetaFeatureMatrix& meta,
                               const AttributionConfig& config) {
  CheckPrior(prior, meta.width());
  return ExpectedGradientsBatch(prior, meta.values, meta.values, config);
}

std::vector<RankedFeature> RankFeatures(const Mlp& prior, const MetaFeatureMatrix& meta,
                                        std::size_t top_n) {
  CheckPrior(prior, meta.width());
  const Tensor g = prior.Predict(meta.values);
  std::vector<RankedFeature> ranking(meta.num_features());
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    ranking[i] = {meta.feature_names.at(i), g(static_cast<Eigen::Index>(i), 0)};
  }
  std::sort(ranking.begin(), ranking.end(), [](const RankedFeature& a, const RankedFeature& b) {
    const double ma = std::abs(a.importance);
    const double mb = std::abs(b.importance);
    if (ma != mb) return ma > mb;
    return a.name < b.name;
  });
  ranking.resize(std::min(top_n, ranking.size()));
  return ranking;
}

PdpCurve PartialDependence(const PriorFunction& prior, const Tensor& meta, std::size_t column,
                           std::size_t grid_size) {
  if (grid_size < 2) throw InvalidArgument("pdp grid needs at least 2 points");
  if (column >= static_cast<std::size_t>(meta.cols())) {
    throw InvalidArgument("pdp column " + std::to_string(column) + " out of range");
  }
  if (meta.rows() == 0) throw InvalidArgument("pdp needs at least one meta-feature row");
  const auto j = static_cast<Eigen::Index>(column);
  const double lo = meta.col(j).minCoeff();
  const double hi = meta.col(j).maxCoeff();
  if (!(hi > lo)) {
    throw InvalidArgument("pdp: meta-feature column " + std::to_string(column) +
                          " is constant; the grid would be degenerate");
  }
  PdpCurve curve;
  curve.meta_feature = column;
  Tensor edited = meta;
  for (std::size_t t = 0; t < grid_size; ++t) {
    const double v = t + 1 == grid_size
                         ? hi
                         : lo + (hi - lo) * static_cast<double>(t) /
                                    static_cast<double>(grid_size - 1);
    edited.col(j).setConstant(v);
    const std::vector<double> out = prior(edited);
    if (out.size() != static_cast<std::size_t>(meta.rows())) {
      throw ShapeError("prior returned " + std::to_string(out.size()) + " outputs for " +
                       std::to_string(meta.rows()) + " rows");
    }
    double sum = 0.0;
    for (double o : out) sum += o;
    const double mean = sum / static_cast<double>(out.size());
    if (!std::isfinite(mean)) throw NumericError("pdp: non-finite prior output");
    curve.grid.push_back(v);
    curve.mean_output.push_back(mean);
    curve.counts.push_back(out.size());
  }
  return curve;
}

PdpCurve PartialDependence(const Mlp& prior, const Tensor& meta, std::size_t column,
                           std::size_t grid_size) {
  CheckPrior(prior, static_cast<std::size_t>(meta.cols()));
  return PartialDependence(
      [&prior](const Tensor& rows) { return ToVector(prior.Predict(rows)); }, meta, column,
      grid_size);
}

void WriteExplanationsCsv(const std::filesystem::path& path, const MetaFeatureMatrix& meta,
                          const Tensor& explanations) {
  if (explanations.rows() != meta.values.rows() || explanations.cols() != meta.values.cols()) {
    throw ShapeError("explanations " + ShapeString(explanations) + " do not match M " +
                     ShapeString(meta.values));
  }
  std::ofstream out = OpenOutput(path);
  std::vector<std::string> cells{"feature"};
  cells.insert(cells.end(), meta.names.begin(), meta.names.end());
  WriteCsvRow(out, cells);
  for (Eigen::Index i = 0; i < explanations.rows(); ++i) {
    cells.assign(1, meta.feature_names.at(static_cast<std::size_t>(i)));
    for (Eigen::Index j = 0; j < explanations.cols(); ++j) {
      cells.push_back(FormatDouble(explanations(i, j)));
    }
    WriteCsvRow(out, cells);
  }
}

void WriteImportanceCsv(const std::filesystem::path& path,
                        const std::vector<RankedFeature>& ranking) {
  std::ofstream out = OpenOutput(path);
  WriteCsvRow(out, {"feature", "importance"});
  for (const RankedFeature& r : ranking) WriteCsvRow(out, {r.name, FormatDouble(r.importance)});
}

void WritePdpCsv(const std::filesystem::path& path, const PdpCurve& curve) {
  std::ofstream out = OpenOutput(path);
  WriteCsvRow(out, {"grid_value", "mean_output", "count"});
  for (std::size_t t = 0; t < curve.grid.size(); ++t) {
    WriteCsvRow(out, {FormatDouble(curve.grid[t]), FormatDouble(curve.mean_output[t]),
                      std::to_string(curve.counts[t])});
  }
}

}  // namespace dapr
