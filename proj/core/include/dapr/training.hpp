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

// Trainers for the prediction network f and the attribution prior g.
//
// TrainDapr alternates, per minibatch, one Adam step on f against
//
//   loss(f(x), y) + lambda * mean_batch sum_i |phi_i(x) - G_i|
//
// where phi are single-draw Expected Gradients attributions of f (kept
// differentiable, so the step uses second derivatives) and G = g(M) is held
// fixed; and one Adam step on g against lambda times the same penalty with
// the attributions of the updated f held fixed.

#ifndef DAPR_TRAINING_HPP_
#define DAPR_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "dapr/datagen.hpp"
#include "dapr/models.hpp"
#include "dapr/tensor.hpp"

namespace dapr {

enum class LossKind { kMse, kBinaryCrossEntropy };

// What the prior's importance G is compared against: the signed attribution
// phi_i (the default) or its magnitude |phi_i|. With kSigned a prior cannot
// ask for a feature to matter without also fixing the sign of its effect;
// kMagnitude lifts that restriction.
enum class AttributionTarget { kSigned, kMagnitude };

std::string_view LossKindName(LossKind loss);
LossKind ParseLossKind(std::string_view name);
std::string_view AttributionTargetName(AttributionTarget target);
AttributionTarget ParseAttributionTarget(std::string_view name);

// Loss matching the task: MSE for regression, logit cross-entropy otherwise.
LossKind DefaultLoss(TaskKind task);

struct DaprConfig {
  double lambda = 1.0;
  double lr_f = 1e-3;
  // Defaults to 0.1 * lr_f so the prior tracks the attributions slowly.
  std::optional<double> lr_g;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  std::size_t eg_samples_per_step = 1;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::kMse;
  AttributionTarget target = AttributionTarget::kSigned;
  // When false g is never stepped and G(M) stays at its initial value.
  bool update_prior = true;

  double prior_learning_rate() const { return lr_g.value_or(0.1 * lr_f); }
  // Throws InvalidArgument.
  void Validate() const;
};

enum class WeightPenalty { kNone, kL1, kL2 };

struct WeightRegularizer {
  WeightPenalty kind = WeightPenalty::kNone;
  double strength = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean prediction loss over the epoch's batches
  double penalty = 0.0;     // mean attribution penalty (0 for standard training)
  double val_loss = 0.0;
  double val_metric = 0.0;  // MSE or accuracy
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;

  const EpochRecord& best() const { return epochs.at(best_epoch); }
  void WriteCsv(const std::filesystem::path& path) const;
};

enum class StepPhase { kPrediction, kPrior };

// Called after every optimizer step with the current models.
using StepObserver = std::function<void(StepPhase phase, const Mlp& model, const Mlp& prior)>;

struct DaprResult {
  Mlp model;
  Mlp prior;
  TrainHistory history;
};

struct StandardResult {
  Mlp model;
  TrainHistory history;
};

// Both trainers draw minibatch order from the "shuffle" substream of
// config.seed and EG draws from the "eg" substream, so with lambda = 0 the
// prediction network follows exactly the TrainStandard trajectory. The
// parameters of the epoch with the lowest validation loss are returned.
// Throws DivergenceError on a non-finite loss or penalty.
DaprResult TrainDapr(const Dataset& dataset, const MetaFeatureMatrix& meta, Mlp model, Mlp prior,
                     const DaprConfig& config, const StepObserver& observer = {});

StandardResult TrainStandard(const Dataset& dataset, Mlp model, const DaprConfig& config,
                             const WeightRegularizer& regularizer = {},
                             const StepObserver& observer = {});

struct Metrics {
  TaskKind task = TaskKind::kRegression;
  double loss = 0.0;      // MSE or mean cross-entropy
  double mse = 0.0;
  double accuracy = 0.0;  // classification only

  // The headline metric: MSE for regression, accuracy for classification.
  double value() const { return task == TaskKind::kRegression ? mse : accuracy; }
};

// True when metric a is strictly better than b for the task.
bool BetterMetric(TaskKind task, double a, double b);

Metrics EvaluatePredictions(TaskKind task, std::span<const double> predictions,
                            std::span<const double> labels);

// Throws InvalidArgument for an empty split.
Metrics Evaluate(const Mlp& model, const Dataset& dataset, Split split);

}  // namespace dapr

#endif  // DAPR_TRAINING_HPP_
