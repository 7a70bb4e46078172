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

#ifndef DAPR_DATAGEN_HPP_
#define DAPR_DATAGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dapr/tensor.hpp"

namespace dapr {

enum class TaskKind { kRegression, kClassification };
enum class Split : std::uint8_t { kTrain, kVal, kTest };

std::string_view TaskKindName(TaskKind task);
TaskKind ParseTaskKind(std::string_view name);
std::string_view SplitName(Split split);

struct Dataset {
  Tensor features;                        // n x p
  std::vector<double> labels;             // n; {0, 1} for classification
  std::vector<std::string> feature_names; // p
  TaskKind task = TaskKind::kRegression;
  std::vector<Split> splits;              // n
  // Regression labels are stored as (raw - label_offset) / label_scale.
  double label_offset = 0.0;
  double label_scale = 1.0;

  std::size_t num_rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t num_features() const { return static_cast<std::size_t>(features.cols()); }

  std::vector<std::size_t> Indices(Split split) const;
  Tensor Features(Split split) const;
  std::vector<double> Labels(Split split) const;

  // Throws InvalidArgument when any invariant is violated.
  void Validate() const;
};

// p x k matrix; row i describes feature i of the paired dataset.
struct MetaFeatureMatrix {
  Tensor values;
  std::vector<std::string> names;          // k meta-feature names
  std::vector<std::string> feature_names;  // p row labels, aligned with Dataset

  std::size_t num_features() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t width() const { return static_cast<std::size_t>(values.cols()); }

  // Checks row count, finiteness and name alignment against the dataset.
  void Validate(const Dataset& dataset) const;
};

struct TwoMoonsData {
  Dataset dataset;
  MetaFeatureMatrix meta;
};

// Two nested half circles in (x_1, x_2) with Gaussian noise of standard
// deviation 0.1, followed by n_nuisance N(0, 1) columns. Classes are
// balanced; rows are split 20/40/40 into train/test/validation. Meta-feature
// row i holds the mean and standard deviation of feature i.
TwoMoonsData GenTwoMoons(std::size_t n, std::size_t n_nuisance, std::uint64_t seed);

struct MetaRegressionData {
  Dataset dataset;
  MetaFeatureMatrix meta;
  std::vector<double> true_weights;  // w, p entries
};

// Linear regression whose coefficients are a nonlinear function of the
// meta-features: w_i = 2 sigmoid(3 m_i1) m_i2, keeping only the floor(p/10)
// largest |w_i|. X ~ N(0, 1), y = X w + noise, labels standardized on the
// training split, split 60/20/20 train/val/test. Requires k >= 2.
MetaRegressionData GenMetaRegression(std::size_t n, std::size_t p, std::size_t k,
                                     double noise_std, std::uint64_t seed);

// Meta-features of pure N(0, 1) noise, independent of any labels.
MetaFeatureMatrix GenNoiseMetaFeatures(const std::vector<std::string>& feature_names,
                                       std::size_t k, std::uint64_t seed);

// Random partition of n rows with the given train and validation fractions;
// the remainder is the test split.
std::vector<Split> RandomSplits(std::size_t n, double train_fraction, double val_fraction,
                                std::uint64_t seed);

// Per-feature (mean, sample standard deviation) over all rows. Labels are
// not read, so using every split leaks nothing about the targets.
MetaFeatureMatrix MomentMetaFeatures(const Dataset& dataset);

struct SplitSpec {
  std::optional<std::filesystem::path> file;  // splits.json
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct LoadedData {
  Dataset dataset;
  MetaFeatureMatrix meta;
};

// Reads features.csv, labels.csv and metafeatures.csv (plus splits.json
// when the spec names one). Throws ParseError with file/row/column on
// malformed input and for feature-name misalignment.
LoadedData LoadCsv(const std::filesystem::path& features, const std::filesystem::path& labels,
                   const std::filesystem::path& metafeatures, const SplitSpec& splits,
                   TaskKind task);

// Writes features.csv, labels.csv, metafeatures.csv and splits.json into dir.
void SaveCsv(const std::filesystem::path& dir, const Dataset& dataset,
             const MetaFeatureMatrix& meta);

void WriteMetaFeaturesCsv(const std::filesystem::path& path, const MetaFeatureMatrix& meta);
MetaFeatureMatrix ReadMetaFeaturesCsv(const std::filesystem::path& path);
void WriteSplitsJson(const std::filesystem::path& path, const std::vector<Split>& splits);
std::vector<Split> ReadSplitsJson(const std::filesystem::path& path, std::size_t n);

}  // namespace dapr

#endif  // DAPR_DATAGEN_HPP_
