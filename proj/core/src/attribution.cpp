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

#include "dapr/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dapr/csv.hpp"
#include "dapr/error.hpp"

namespace dapr {
namespace {

// Bounds the graph size when many draws are evaluated for one input.
constexpr std::size_t kDrawChunk = 2048;

void CheckWidths(const Mlp& model, std::size_t x_width, const Tensor& references) {
  if (references.rows() == 0) throw InvalidArgument("expected gradients: empty reference set");
  if (model.input_width() != x_width) {
    throw ShapeError("expected gradients: model expects width " +
                     std::to_string(model.input_width()) + ", input has " +
                     std::to_string(x_width));
  }
  if (static_cast<std::size_t>(references.cols()) != x_width) {
    throw ShapeError("expected gradients: references have width " +
                     std::to_string(references.cols()) + ", input has " +
                     std::to_string(x_width));
  }
}

}  // namespace

EgDraws SampleEgDraws(std::size_t n_draws, std::size_t n_references, Rng& rng) {
  if (n_references == 0) throw InvalidArgument("expected gradients: empty reference set");
  EgDraws draws;
  draws.reference_rows.reserve(n_draws);
  draws.alphas.reserve(n_draws);
  for (std::size_t s = 0; s < n_draws; ++s) {
    draws.reference_rows.push_back(UniformIndex(rng, n_references));
    draws.alphas.push_back(Uniform01(rng));
  }
  return draws;
}

Tensor ExpectedGradientsDraws(const Mlp& model, std::span<const double> x,
                              const Tensor& references, const EgDraws& draws) {
  CheckWidths(model, x.size(), references);
  const auto p = static_cast<Eigen::Index>(x.size());
  const std::size_t n = draws.alphas.size();
  if (n == 0 || draws.reference_rows.size() != n) {
    throw InvalidArgument("expected gradients: need at least one (reference, alpha) draw");
  }
  const Tensor x_row = RowVector(x);
  Tensor out(static_cast<Eigen::Index>(n), p);
  for (std::size_t begin = 0; begin < n; begin += kDrawChunk) {
    const std::size_t end = std::min(n, begin + kDrawChunk);
    const auto rows = static_cast<Eigen::Index>(end - begin);
    Tensor delta(rows, p);
    Tensor points(rows, p);
    for (std::size_t s = begin; s < end; ++s) {
      const auto r = static_cast<Eigen::Index>(s - begin);
      const auto ref = references.row(static_cast<Eigen::Index>(draws.reference_rows[s]));
      delta.row(r) = x_row.row(0) - ref;
      points.row(r) = ref + draws.alphas[s] * delta.row(r);
    }
    Graph graph;
    const std::vector<Var> params = model.Bind(graph, /*requires_grad=*/false);
    const Var z = graph.Leaf(points);
    const Var grad = graph.Gradient(Sum(model.Forward(z, params)), {z})[0];
    out.middleRows(static_cast<Eigen::Index>(begin), rows) = delta.cwiseProduct(grad.value());
  }
  if (!out.allFinite()) throw NumericError("expected gradients: non-finite gradient");
  return out;
}

Tensor ExpectedGradientsDraws(const Mlp& model, std::span<const double> x,
                              const Tensor& references, const AttributionConfig& config) {
  if (config.n_samples == 0) throw InvalidArgument("expected gradients: n_samples must be >= 1");
  CheckWidths(model, x.size(), references);
  Rng rng(config.seed);
  const EgDraws draws =
      SampleEgDraws(config.n_samples, static_cast<std::size_t>(references.rows()), rng);
  return ExpectedGradientsDraws(model, x, references, draws);
}

std::vector<double> ExpectedGradients(const Mlp& model, std::span<const double> x,
                                      const Tensor& references, const AttributionConfig& config) {
  return ToVector(ExpectedGradientsDraws(model, x, references, config).colwise().mean());
}

Tensor ExpectedGradientsBatch(const Mlp& model, const Tensor& inputs, const Tensor& references,
                              const AttributionConfig& config) {
  Tensor out(inputs.rows(), inputs.cols());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    AttributionConfig row_config = config;
    row_config.seed = SubstreamSeed(config.seed, static_cast<std::uint64_t>(i));
    const Tensor row = inputs.row(i);
    out.row(i) = ExpectedGradientsDraws(model, Values(row), references, row_config).colwise().mean();
  }
  return out;
}

Var ExpectedGradientsGraph(Graph& graph, const Mlp& model, std::span<const Var> params,
                           const Tensor& inputs, const Tensor& references,
                           std::span<const double> alphas) {
  if (references.rows() != inputs.rows() || references.cols() != inputs.cols()) {
    throw ShapeError("expected gradients: references " + ShapeString(references) +
                     " do not match inputs " + ShapeString(inputs));
  }
  if (alphas.size() != static_cast<std::size_t>(inputs.rows())) {
    throw ShapeError("expected gradients: need one alpha per input row");
  }
  CheckWidths(model, static_cast<std::size_t>(inputs.cols()), references);
  const Tensor delta = inputs - references;
  Tensor points = references;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    points.row(r) += alphas[static_cast<std::size_t>(r)] * delta.row(r);
  }
  const Var z = graph.Leaf(std::move(points));
  const Var grad = graph.Gradient(Sum(model.Forward(z, params)), {z})[0];
  return Mul(grad, graph.Constant(delta));
}

double AttributionPenalty(const Tensor& attributions, std::span<const double> importance) {
  if (static_cast<std::size_t>(attributions.cols()) != importance.size()) {
    throw ShapeError("attribution penalty: attributions have " +
                     std::to_string(attributions.cols()) + " features, importance has " +
                     std::to_string(importance.size()));
  }
  if (attributions.rows() == 0) throw InvalidArgument("attribution penalty: empty batch");
  double total = 0.0;
  for (Eigen::Index b = 0; b < attributions.rows(); ++b) {
    for (Eigen::Index i = 0; i < attributions.cols(); ++i) {
      total += std::abs(attributions(b, i) - importance[static_cast<std::size_t>(i)]);
    }
  }
  return total / static_cast<double>(attributions.rows());
}

Var AttributionPenalty(Var attributions, Var importance) {
  if (importance.rows() != 1 || importance.cols() != attributions.cols()) {
    throw ShapeError("attribution penalty: importance " + ShapeString(importance.value()) +
                     " does not match attributions " + ShapeString(attributions.value()));
  }
  const Var diff = Sub(attributions, BroadcastRows(importance, attributions.rows()));
  return Scale(Sum(Abs(diff)), 1.0 / static_cast<double>(attributions.rows()));
}

void WriteAttributionsCsv(const std::filesystem::path& path,
                          const std::vector<std::string>& feature_names,
                          const Tensor& attributions) {
  if (feature_names.size() != static_cast<std::size_t>(attributions.cols())) {
    throw ShapeError("attributions.csv: " + std::to_string(feature_names.size()) +
                     " names for " + std::to_string(attributions.cols()) + " columns");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  WriteCsvRow(out, feature_names);
  for (Eigen::Index r = 0; r < attributions.rows(); ++r) {
    std::vector<std::string> cells;
    cells.reserve(static_cast<std::size_t>(attributions.cols()));
    for (Eigen::Index c = 0; c < attributions.cols(); ++c) cells.push_back(FormatDouble(attributions(r, c)));
    WriteCsvRow(out, cells);
  }
}

}  // namespace dapr
