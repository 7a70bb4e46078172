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

// The "dapr train" configuration document. See docs in README.md for the
// schema; every section is validated before any work starts.

#ifndef DAPR_CLI_RUN_CONFIG_HPP_
#define DAPR_CLI_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dapr/baselines.hpp"
#include "dapr/sweep.hpp"
#include "dapr/training.hpp"

namespace dapr::cli {

struct DataFiles {
  std::filesystem::path features;
  std::filesystem::path labels;
  std::filesystem::path metafeatures;
  std::optional<std::filesystem::path> splits;
  TaskKind task = TaskKind::kRegression;
  double train_fraction = 0.6;
  double val_fraction = 0.2;
};

struct ExplainSettings {
  std::size_t n_samples = 200;
  std::size_t top_n = 0;  // 0: every feature
  std::vector<std::string> pdp;
  std::size_t grid = 50;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> output;
  std::optional<GeneratorSpec> generator;  // exactly one of generator / files
  std::optional<DataFiles> files;
  VariantKind variant = VariantKind::kDapr;
  NetworkSpec predictor;
  PriorSpec prior;
  DaprConfig trainer;
  double weight_penalty = 0.0;  // mlp_l1 / mlp_l2
  double lasso_lambda = 0.01;
  MergeConfig merge;
  std::optional<ExplainSettings> explain;
  nlohmann::json document;  // as given, echoed into metrics.json
};

// Relative file paths resolve against base_dir. Throws ConfigError listing
// every problem.
RunConfig ParseRunConfig(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

}  // namespace dapr::cli

#endif  // DAPR_CLI_RUN_CONFIG_HPP_
