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

// Expected Gradients attributions and the attribution-prior penalty.
//
// For an input x, a reference x' drawn uniformly from a reference set and
// alpha ~ U(0, 1), one draw contributes
//
//   (x_i - x'_i) * df/dx_i evaluated at x' + alpha (x - x')
//
// to feature i, and the attribution is the mean over draws. In expectation
// the attributions sum to f(x) - E[f(x')].

#ifndef DAPR_ATTRIBUTION_HPP_
#define DAPR_ATTRIBUTION_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dapr/autodiff.hpp"
#include "dapr/models.hpp"
#include "dapr/rng.hpp"
#include "dapr/tensor.hpp"

namespace dapr {

struct AttributionConfig {
  std::size_t n_samples = 200;
  std::uint64_t seed = 0;
};

// Sampled (reference row, alpha) pairs.
struct EgDraws {
  std::vector<std::size_t> reference_rows;
  std::vector<double> alphas;
};

EgDraws SampleEgDraws(std::size_t n_draws, std::size_t n_references, Rng& rng);

// Per-draw contributions for one input: an n_samples x p tensor whose column
// means are the attributions. Throws InvalidArgument for an empty reference
// set or n_samples == 0, ShapeError for width mismatches.
Tensor ExpectedGradientsDraws(const Mlp& model, std::span<const double> x,
                              const Tensor& references, const AttributionConfig& config);

// Same estimate from explicit draws.
Tensor ExpectedGradientsDraws(const Mlp& model, std::span<const double> x,
                              const Tensor& references, const EgDraws& draws);

std::vector<double> ExpectedGradients(const Mlp& model, std::span<const double> x,
                                      const Tensor& references, const AttributionConfig& config);

// One attribution row per input row. Row i uses the rng substream
// SubstreamSeed(config.seed, i), so rows are independent of each other and
// of evaluation order.
Tensor ExpectedGradientsBatch(const Mlp& model, const Tensor& inputs, const Tensor& references,
                              const AttributionConfig& config);

// Single-draw attributions of every row of inputs, kept differentiable with
// respect to the bound model parameters. references holds the sampled
// reference row for each input and alphas one interpolation weight per row.
Var ExpectedGradientsGraph(Graph& graph, const Mlp& model, std::span<const Var> params,
                           const Tensor& inputs, const Tensor& references,
                           std::span<const double> alphas);

// Mean over rows of sum_i |attributions(b, i) - importance_i|. Throws
// ShapeError when widths differ.
double AttributionPenalty(const Tensor& attributions, std::span<const double> importance);

// Graph version; importance is a 1 x p node.
Var AttributionPenalty(Var attributions, Var importance);

// attributions.csv: header of feature names, one row per explained sample.
void WriteAttributionsCsv(const std::filesystem::path& path,
                          const std::vector<std::string>& feature_names,
                          const Tensor& attributions);

}  // namespace dapr

#endif  // DAPR_ATTRIBUTION_HPP_
