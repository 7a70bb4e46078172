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

// Experiment sweeps: every (variant, setting, seed) trial trains its
// hyperparameter grid, keeps the configuration with the best validation
// metric, and reports its test metric. Trials are independent and may run
// concurrently; results do not depend on scheduling.

#ifndef DAPR_SWEEP_HPP_
#define DAPR_SWEEP_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dapr/config.hpp"
#include "dapr/datagen.hpp"
#include "dapr/models.hpp"
#include "dapr/training.hpp"

namespace dapr {

enum class GeneratorKind { kTwoMoons, kMetaRegression };

std::string_view GeneratorKindName(GeneratorKind kind);
GeneratorKind ParseGeneratorKind(std::string_view name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kTwoMoons;
  std::size_t n = 1000;
  std::size_t nuisance = 50;  // two-moons
  std::size_t p = 500;        // meta-regression
  std::size_t k = 4;          // meta-regression
  double noise_std = 0.1;     // meta-regression

  // Copy with one numeric field ("n", "nuisance", "p", "k", "noise_std")
  // replaced. Throws InvalidArgument for other names.
  GeneratorSpec With(const std::string& parameter, double value) const;
};

struct GeneratedData {
  Dataset dataset;
  MetaFeatureMatrix meta;
  std::vector<double> true_weights;  // empty for two-moons
};

GeneratedData Generate(const GeneratorSpec& spec, std::uint64_t seed);

enum class VariantKind { kMlp, kMlpL1, kMlpL2, kDapr, kDaprNoise, kLasso, kMerge, kNaive };

std::string_view VariantKindName(VariantKind kind);
VariantKind ParseVariantKind(std::string_view name);

struct NetworkSpec {
  // Hidden widths; unset means the generator's default architecture.
  std::optional<std::vector<std::size_t>> hidden;
  Activation activation = Activation::kRelu;
  // Start the output layer at zero so the untrained network is the constant
  // 0 instead of a random function of its inputs.
  bool zero_output = false;
};

struct PriorSpec {
  bool linear = false;  // g(m) = beta . m + beta_0
  std::vector<std::size_t> hidden{4};
  Activation activation = Activation::kRelu;
  bool zero_output = false;
};

// BuildMlp for the spec's hidden widths between in and a single output.
Mlp BuildNetwork(const NetworkSpec& spec, std::size_t in, const std::vector<std::size_t>& hidden,
                 std::uint64_t seed);
Mlp BuildPrior(const PriorSpec& spec, std::size_t k, std::uint64_t seed);

struct VariantSpec {
  std::string name;
  VariantKind kind = VariantKind::kMlp;
  NetworkSpec model;
  PriorSpec prior;
  // Penalty weights searched: lambda for DAPr, the weight penalty for L1/L2
  // MLPs, the L1 weight for LASSO, the coupling for MERGE. Empty means the
  // variant's default grid.
  std::vector<double> lambdas;
  std::vector<double> learning_rates;  // lr_f; empty means the default grid
};

// Default grids: lambda {0.01, 0.1, 1, 10} for DAPr, {1e-4, 1e-3, 1e-2}
// for weight penalties, {1, 0.1, 0.01, 0.001} for the MERGE coupling,
// LASSO uses lambda_max times {0.5, 0.2, 0.1, 0.05, 0.02, 0.01}; learning
// rates {1e-3, 1e-4}.
std::vector<double> DefaultLambdaGrid(VariantKind kind);
std::vector<double> DefaultLearningRateGrid();

// Architecture of f for a generator: the two-moons rule or 512/256 hidden
// units otherwise.
std::vector<std::size_t> DefaultArchitecture(GeneratorKind kind, std::size_t p);

struct SweepAxis {
  std::string parameter;       // GeneratorSpec field
  std::vector<double> values;  // one setting per value
};

struct SweepSpec {
  GeneratorSpec generator;
  std::optional<SweepAxis> axis;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<VariantSpec> variants;
  DaprConfig trainer;  // lambda, lr_f and seed are overwritten per grid point
};

// Parses {"generator", "sweep", "seeds", "variants", "trainer"}; throws
// ConfigError listing every problem.
SweepSpec ParseSweepSpec(const nlohmann::json& doc);

// Reads the optional DaprConfig fields of a "trainer" section.
DaprConfig ReadTrainerConfig(ConfigReader& reader, DaprConfig base = {});
NetworkSpec ReadNetworkSpec(ConfigReader& reader);
PriorSpec ReadPriorSpec(ConfigReader& reader);

struct TrialResult {
  std::string variant;
  double setting = 0.0;  // axis value; NaN without an axis
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double lambda = 0.0;  // selected
  double lr_f = 0.0;    // selected; 0 for linear baselines
  double val_metric = 0.0;
  double test_metric = 0.0;
  std::size_t best_epoch = 0;
  // Spearman correlation of |g(m_i)| with |w_i| (DAPr variants with known
  // weights); NaN otherwise.
  double prior_spearman = 0.0;
};

struct AggregateResult {
  std::string variant;
  double setting = 0.0;
  std::size_t n = 0;  // successful trials
  double mean = 0.0;
  double standard_error = 0.0;
  double mean_prior_spearman = 0.0;
};

struct SweepResult {
  std::vector<TrialResult> trials;  // ordered by setting, seed, variant
  std::vector<AggregateResult> aggregates;
  std::size_t failures = 0;
};

// Runs one trial on pre-generated data.
TrialResult RunTrial(const SweepSpec& spec, const VariantSpec& variant, const GeneratedData& data,
                     double setting, std::uint64_t seed);

using TrialCallback = std::function<void(const TrialResult&)>;

// Failed trials are recorded (ok = false) and the sweep continues.
SweepResult RunSweep(const SweepSpec& spec, std::size_t jobs = 1,
                     const TrialCallback& on_trial = {});

std::vector<AggregateResult> Aggregate(const std::vector<TrialResult>& trials);

// results.csv: trial rows then aggregate rows, flagged by the "aggregate"
// column.
void WriteResultsCsv(const std::filesystem::path& path, const SweepResult& result);

}  // namespace dapr

#endif  // DAPR_SWEEP_HPP_
