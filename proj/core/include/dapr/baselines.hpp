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

#ifndef DAPR_BASELINES_HPP_
#define DAPR_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dapr/datagen.hpp"
#include "dapr/models.hpp"
#include "dapr/tensor.hpp"
#include "dapr/training.hpp"

namespace dapr {

struct LinearModel {
  std::vector<double> weights;
  double intercept = 0.0;

  std::vector<double> Predict(const Tensor& inputs) const;
};

struct LassoOptions {
  // Solve on columns centered and scaled to unit variance (training data
  // statistics); weights are mapped back to the original scale.
  bool standardize = true;
  double tolerance = 1e-8;
  std::size_t max_sweeps = 100000;
};

// Cyclic coordinate descent on
//   (1/2n) ||y - X w - b||^2 + lambda ||w||_1
// (on the standardized design when options.standardize). Stops once no
// coordinate moves more than the tolerance and the duality gap is below it.
LinearModel LassoFit(const Tensor& x, std::span<const double> y, double lambda,
                     const LassoOptions& options = {});

// The objective above on the given (unstandardized) design.
double LassoObjective(const Tensor& x, std::span<const double> y, const LinearModel& model,
                      double lambda);

// Smallest lambda for which the (unstandardized) solution is w = 0.
double LassoLambdaMax(const Tensor& x, std::span<const double> y);

struct MergeConfig {
  double coupling = 1.0;  // lambda_m
  double ridge = 1e-6;    // ridge on beta, relative to the coupling term
  std::size_t max_iterations = 1000;
  double tolerance = 1e-8;  // on max |w_t - w_{t-1}|
};

struct MergeResult {
  LinearModel model;
  std::vector<double> beta;
  // Joint objective at the start and after every half-step.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

// Alternating minimization of
//   (1/2n) ||y_c - X_c w||^2 + lambda_m (||w - M beta||^2 + ridge ||beta||^2)
// on centered data, starting from w = 0, beta = 0. Both half-steps are exact
// linear solves. Throws Error when a system is singular.
MergeResult MergeFit(const Tensor& x, std::span<const double> y, const Tensor& meta,
                     const MergeConfig& config);

double MergeObjective(const Tensor& x, std::span<const double> y, const Tensor& meta,
                      const MergeConfig& config, std::span<const double> w,
                      std::span<const double> beta);

struct NaiveConfig {
  std::size_t max_input_width = 1u << 20;
};

// Appends the flattened meta-feature matrix (row-major, p * k values) to
// every sample. Throws InvalidArgument when p + p*k exceeds the bound.
Dataset AppendMetaFeatures(const Dataset& dataset, const MetaFeatureMatrix& meta,
                           const NaiveConfig& config = {});

// Input width of the naive model: p + p*k. Throws InvalidArgument above the
// bound.
std::size_t NaiveInputWidth(std::size_t p, std::size_t k, const NaiveConfig& config = {});

// Trains model, whose input width must be NaiveInputWidth(p, k), on
// AppendMetaFeatures(dataset).
StandardResult NaiveMetaFeatureMlp(const Dataset& dataset, const MetaFeatureMatrix& meta,
                                   Mlp model, const DaprConfig& config,
                                   const NaiveConfig& naive = {});

Metrics EvaluateLinear(const LinearModel& model, const Dataset& dataset, Split split);

}  // namespace dapr

#endif  // DAPR_BASELINES_HPP_
