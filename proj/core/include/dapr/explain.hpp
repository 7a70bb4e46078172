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

// Explanations of a trained prior g: attributions of its predicted
// importance to the meta-features, importance rankings, and partial
// dependence curves.

#ifndef DAPR_EXPLAIN_HPP_
#define DAPR_EXPLAIN_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dapr/attribution.hpp"
#include "dapr/datagen.hpp"
#include "dapr/models.hpp"
#include "dapr/tensor.hpp"

namespace dapr {

// p x k: entry (i, j) attributes g(m_i) to meta-feature j. References are
// the rows of M; row i draws from SubstreamSeed(config.seed, i).
Tensor SecondOrderExplanations(const Mlp& prior, const MetaFeatureMatrix& meta,
                               const AttributionConfig& config);

struct RankedFeature {
  std::string name;
  double importance = 0.0;  // g(m_i), signed
};

// Features sorted by |g(m_i)| descending, ties by name. top_n is clamped to p.
std::vector<RankedFeature> RankFeatures(const Mlp& prior, const MetaFeatureMatrix& meta,
                                        std::size_t top_n);

struct PdpCurve {
  std::size_t meta_feature = 0;
  std::vector<double> grid;
  std::vector<double> mean_output;
  std::vector<std::size_t> counts;  // rows averaged at each grid point
};

// Prior evaluated on a batch of meta-feature rows, one output per row.
using PriorFunction = std::function<std::vector<double>(const Tensor&)>;

// grid_size equally spaced values from min to max of column j; each output
// is the mean over all rows of g with coordinate j replaced. Throws
// InvalidArgument for grid_size < 2, an out-of-range column, or a constant
// column.
PdpCurve PartialDependence(const PriorFunction& prior, const Tensor& meta, std::size_t column,
                           std::size_t grid_size = 50);
PdpCurve PartialDependence(const Mlp& prior, const Tensor& meta, std::size_t column,
                           std::size_t grid_size = 50);

// explanations.csv: feature column then one column per meta-feature.
void WriteExplanationsCsv(const std::filesystem::path& path, const MetaFeatureMatrix& meta,
                          const Tensor& explanations);
// importance.csv: feature,importance in ranking order.
void WriteImportanceCsv(const std::filesystem::path& path,
                        const std::vector<RankedFeature>& ranking);
// pdp_<name>.csv: grid_value,mean_output,count.
void WritePdpCsv(const std::filesystem::path& path, const PdpCurve& curve);

}  // namespace dapr

#endif  // DAPR_EXPLAIN_HPP_
