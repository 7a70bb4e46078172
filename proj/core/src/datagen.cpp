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

#include "dapr/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "dapr/csv.hpp"
#include "dapr/error.hpp"
#include "dapr/rng.hpp"

namespace dapr {
namespace {

std::vector<std::string> DefaultFeatureNames(std::size_t p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t i = 0; i < p; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

std::vector<Split> SplitsFromCounts(std::size_t n, std::size_t first_count, Split first,
                                    std::size_t second_count, Split second, Split rest, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Split> splits(n, rest);
  for (std::size_t i = 0; i < first_count; ++i) splits[perm[i]] = first;
  for (std::size_t i = first_count; i < first_count + second_count; ++i) splits[perm[i]] = second;
  return splits;
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double SampleStd(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string_view TaskKindName(TaskKind task) {
  return task == TaskKind::kClassification ? "classification" : "regression";
}

TaskKind ParseTaskKind(std::string_view name) {
  if (name == "classification") return TaskKind::kClassification;
  if (name == "regression") return TaskKind::kRegression;
  throw InvalidArgument("unknown task kind '" + std::string(name) + "'");
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

std::vector<std::size_t> Dataset::Indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split) out.push_back(i);
  }
  return out;
}

Tensor Dataset::Features(Split split) const {
  const auto idx = Indices(split);
  return GatherRows(features, idx);
}

std::vector<double> Dataset::Labels(Split split) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split) out.push_back(labels[i]);
  }
  return out;
}

void Dataset::Validate() const {
  if (labels.size() != num_rows()) {
    throw InvalidArgument("dataset has " + std::to_string(num_rows()) + " feature rows but " +
                          std::to_string(labels.size()) + " labels");
  }
  if (splits.size() != num_rows()) {
    throw InvalidArgument("dataset split assignment does not cover every row");
  }
  if (feature_names.size() != num_features()) {
    throw InvalidArgument("dataset has " + std::to_string(num_features()) + " features but " +
                          std::to_string(feature_names.size()) + " names");
  }
  if (!features.allFinite()) throw InvalidArgument("dataset features contain non-finite values");
  for (double y : labels) {
    if (!std::isfinite(y)) throw InvalidArgument("dataset labels contain non-finite values");
    if (task == TaskKind::kClassification && y != 0.0 && y != 1.0) {
      throw InvalidArgument("classification labels must be 0 or 1");
    }
  }
}

void MetaFeatureMatrix::Validate(const Dataset& dataset) const {
  if (num_features() != dataset.num_features()) {
    throw InvalidArgument("meta-feature matrix has " + std::to_string(num_features()) +
                          " rows for " + std::to_string(dataset.num_features()) + " features");
  }
  if (!values.allFinite()) throw InvalidArgument("meta-features contain non-finite values");
  if (names.size() != width()) throw InvalidArgument("meta-feature names do not match columns");
  if (feature_names != dataset.feature_names) {
    throw InvalidArgument("meta-feature rows are not aligned with the dataset's features");
  }
}

std::vector<Split> RandomSplits(std::size_t n, double train_fraction, double val_fraction,
                                std::uint64_t seed) {
  if (train_fraction < 0.0 || val_fraction < 0.0 || train_fraction + val_fraction > 1.0) {
    throw InvalidArgument("split fractions must be nonnegative and sum to at most 1");
  }
  Rng rng(seed);
  const auto train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  const auto val = static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(n)));
  return SplitsFromCounts(n, train, Split::kTrain, val, Split::kVal, Split::kTest, rng);
}

MetaFeatureMatrix MomentMetaFeatures(const Dataset& dataset) {
  const Tensor& x = dataset.features;
  if (x.rows() < 2) throw InvalidArgument("moment meta-features need at least two rows");
  MetaFeatureMatrix meta;
  meta.values.resize(x.cols(), 2);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    std::vector<double> column(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) column[static_cast<std::size_t>(r)] = x(r, j);
    const double mean = Mean(column);
    meta.values(j, 0) = mean;
    meta.values(j, 1) = SampleStd(column, mean);
  }
  meta.names = {"mean", "std"};
  meta.feature_names = dataset.feature_names;
  return meta;
}

TwoMoonsData GenTwoMoons(std::size_t n, std::size_t n_nuisance, std::uint64_t seed) {
  if (n < 50) throw InvalidArgument("two moons needs n >= 50");
  const std::size_t p = 2 + n_nuisance;
  Rng rng = MakeRng(seed, "data");
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset data;
  data.task = TaskKind::kClassification;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  data.labels.resize(n);
  data.feature_names = DefaultFeatureNames(p);
  const std::size_t n_class0 = (n + 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double t = std::numbers::pi * Uniform01(rng);
    const bool upper = i < n_class0;
    const double a = upper ? std::cos(t) : 1.0 - std::cos(t);
    const double b = upper ? std::sin(t) : 0.5 - std::sin(t);
    data.features(r, 0) = a + 0.1 * normal(rng);
    data.features(r, 1) = b + 0.1 * normal(rng);
    for (std::size_t j = 2; j < p; ++j) data.features(r, static_cast<Eigen::Index>(j)) = normal(rng);
    data.labels[i] = upper ? 0.0 : 1.0;
  }
  Rng split_rng = MakeRng(seed, "split");
  const std::size_t train = n / 5;
  const std::size_t test = (n - train) / 2;
  data.splits = SplitsFromCounts(n, train, Split::kTrain, test, Split::kTest, Split::kVal, split_rng);
  data.Validate();

  TwoMoonsData out;
  out.meta = MomentMetaFeatures(data);
  out.dataset = std::move(data);
  return out;
}

MetaRegressionData GenMetaRegression(std::size_t n, std::size_t p, std::size_t k,
                                     double noise_std, std::uint64_t seed) {
  if (n == 0 || p == 0 || k == 0) throw InvalidArgument("n, p and k must be positive");
  if (k < 2) throw InvalidArgument("meta regression needs k >= 2 meta-features");
  if (!(noise_std >= 0.0)) throw InvalidArgument("noise_std must be nonnegative");
  Rng rng = MakeRng(seed, "data");
  std::normal_distribution<double> normal(0.0, 1.0);

  MetaRegressionData out;
  MetaFeatureMatrix& meta = out.meta;
  meta.values.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < meta.values.size(); ++i) meta.values.data()[i] = normal(rng);
  for (std::size_t j = 0; j < k; ++j) meta.names.push_back("m" + std::to_string(j + 1));
  meta.feature_names = DefaultFeatureNames(p);

  std::vector<double> w(p);
  for (std::size_t i = 0; i < p; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    w[i] = 2.0 / (1.0 + std::exp(-3.0 * meta.values(r, 0))) * meta.values(r, 1);
  }
  const std::size_t keep = p / 10;
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(w[a]) > std::abs(w[b]); });
  for (std::size_t r = keep; r < p; ++r) w[order[r]] = 0.0;
  out.true_weights = w;

  Dataset& data = out.dataset;
  data.task = TaskKind::kRegression;
  data.feature_names = meta.feature_names;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < data.features.size(); ++i) data.features.data()[i] = normal(rng);
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(p));
  const Eigen::VectorXd clean = data.features * wv;
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    data.labels[i] = clean(static_cast<Eigen::Index>(i)) + noise_std * normal(rng);
  }

  Rng split_rng = MakeRng(seed, "split");
  const std::size_t train = n * 3 / 5;
  const std::size_t val = n / 5;
  data.splits = SplitsFromCounts(n, train, Split::kTrain, val, Split::kVal, Split::kTest, split_rng);

  const std::vector<double> train_labels = data.Labels(Split::kTrain);
  const double mean = train_labels.empty() ? 0.0 : Mean(train_labels);
  double scale = SampleStd(train_labels, mean);
  if (!(scale > 0.0)) scale = 1.0;
  for (double& y : data.labels) y = (y - mean) / scale;
  data.label_offset = mean;
  data.label_scale = scale;
  data.Validate();
  return out;
}

MetaFeatureMatrix GenNoiseMetaFeatures(const std::vector<std::string>& feature_names,
                                       std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InvalidArgument("k must be positive");
  Rng rng = MakeRng(seed, "noise-meta");
  std::normal_distribution<double> normal(0.0, 1.0);
  MetaFeatureMatrix meta;
  meta.values.resize(static_cast<Eigen::Index>(feature_names.size()), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < meta.values.size(); ++i) meta.values.data()[i] = normal(rng);
  for (std::size_t j = 0; j < k; ++j) meta.names.push_back("noise" + std::to_string(j + 1));
  meta.feature_names = feature_names;
  return meta;
}

void WriteMetaFeaturesCsv(const std::filesystem::path& path, const MetaFeatureMatrix& meta) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  std::vector<std::string> header{"feature"};
  header.insert(header.end(), meta.names.begin(), meta.names.end());
  WriteCsvRow(out, header);
  for (Eigen::Index r = 0; r < meta.values.rows(); ++r) {
    std::vector<std::string> cells{meta.feature_names[static_cast<std::size_t>(r)]};
    for (Eigen::Index c = 0; c < meta.values.cols(); ++c) cells.push_back(FormatDouble(meta.values(r, c)));
    WriteCsvRow(out, cells);
  }
}

MetaFeatureMatrix ReadMetaFeaturesCsv(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path);
  if (table.header.size() < 2) {
    throw ParseError(path.string(), 1, 0, "expected a feature-name column and at least one meta-feature");
  }
  MetaFeatureMatrix meta;
  meta.names.assign(table.header.begin() + 1, table.header.end());
  meta.values.resize(static_cast<Eigen::Index>(table.rows.size()),
                     static_cast<Eigen::Index>(meta.names.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    meta.feature_names.push_back(table.rows[r][0]);
    for (std::size_t c = 1; c < table.header.size(); ++c) {
      meta.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) =
          ParseCell(table.rows[r][c], path.string(), r + 2, c + 1);
    }
  }
  return meta;
}

void WriteSplitsJson(const std::filesystem::path& path, const std::vector<Split>& splits) {
  nlohmann::json doc = {{"train", nlohmann::json::array()},
                        {"val", nlohmann::json::array()},
                        {"test", nlohmann::json::array()}};
  for (std::size_t i = 0; i < splits.size(); ++i) doc[std::string(SplitName(splits[i]))].push_back(i);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump() << '\n';
}

std::vector<Split> ReadSplitsJson(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open file");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, 0, e.what());
  }
  std::vector<int> seen(n, -1);
  std::vector<Split> splits(n, Split::kTrain);
  for (Split split : {Split::kTrain, Split::kVal, Split::kTest}) {
    const std::string key(SplitName(split));
    if (!doc.contains(key) || !doc[key].is_array()) {
      throw ParseError(path.string(), 0, 0, "missing \"" + key + "\" index list");
    }
    for (const auto& v : doc[key]) {
      if (!v.is_number_unsigned() || v.get<std::size_t>() >= n) {
        throw ParseError(path.string(), 0, 0, "invalid row index in \"" + key + "\"");
      }
      const auto i = v.get<std::size_t>();
      if (seen[i] != -1) {
        throw ParseError(path.string(), 0, 0, "row " + std::to_string(i) + " assigned twice");
      }
      seen[i] = 1;
      splits[i] = split;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] == -1) {
      throw ParseError(path.string(), 0, 0, "row " + std::to_string(i) + " has no split");
    }
  }
  return splits;
}

LoadedData LoadCsv(const std::filesystem::path& features, const std::filesystem::path& labels,
                   const std::filesystem::path& metafeatures, const SplitSpec& splits,
                   TaskKind task) {
  LoadedData out;
  Dataset& data = out.dataset;
  data.task = task;

  const CsvTable x = ReadCsv(features);
  data.feature_names = x.header;
  data.features.resize(static_cast<Eigen::Index>(x.rows.size()), static_cast<Eigen::Index>(x.header.size()));
  for (std::size_t r = 0; r < x.rows.size(); ++r) {
    for (std::size_t c = 0; c < x.header.size(); ++c) {
      data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          ParseCell(x.rows[r][c], features.string(), r + 2, c + 1);
    }
  }

  const CsvTable y = ReadCsv(labels);
  if (y.header.size() != 1) throw ParseError(labels.string(), 1, 0, "expected a single label column");
  if (y.rows.size() != x.rows.size()) {
    throw ParseError(labels.string(), 0, 0,
                     std::to_string(y.rows.size()) + " labels for " + std::to_string(x.rows.size()) +
                         " feature rows");
  }
  for (std::size_t r = 0; r < y.rows.size(); ++r) {
    const double v = ParseCell(y.rows[r][0], labels.string(), r + 2, 1);
    if (task == TaskKind::kClassification && v != 0.0 && v != 1.0) {
      throw ParseError(labels.string(), r + 2, 1, "classification label must be 0 or 1");
    }
    data.labels.push_back(v);
  }

  out.meta = ReadMetaFeaturesCsv(metafeatures);
  if (out.meta.num_features() != data.num_features()) {
    throw ParseError(metafeatures.string(), 0, 0,
                     "alignment error: " + std::to_string(out.meta.num_features()) +
                         " meta-feature rows for " + std::to_string(data.num_features()) +
                         " features in " + features.string());
  }
  for (std::size_t i = 0; i < data.num_features(); ++i) {
    if (out.meta.feature_names[i] != data.feature_names[i]) {
      throw ParseError(metafeatures.string(), i + 2, 1,
                       "alignment error: row names feature '" + out.meta.feature_names[i] +
                           "' but column " + std::to_string(i + 1) + " of " + features.string() +
                           " is '" + data.feature_names[i] + "'");
    }
  }

  data.splits = splits.file ? ReadSplitsJson(*splits.file, data.num_rows())
                            : RandomSplits(data.num_rows(), splits.train_fraction,
                                           splits.val_fraction, splits.seed);
  data.Validate();
  return out;
}

void SaveCsv(const std::filesystem::path& dir, const Dataset& dataset,
             const MetaFeatureMatrix& meta) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
  {
    std::ofstream out(dir / "features.csv");
    if (!out) throw Error("cannot write " + (dir / "features.csv").string());
    WriteCsvRow(out, dataset.feature_names);
    std::vector<std::string> cells(dataset.num_features());
    for (Eigen::Index r = 0; r < dataset.features.rows(); ++r) {
      for (Eigen::Index c = 0; c < dataset.features.cols(); ++c) {
        cells[static_cast<std::size_t>(c)] = FormatDouble(dataset.features(r, c));
      }
      WriteCsvRow(out, cells);
    }
  }
  {
    std::ofstream out(dir / "labels.csv");
    if (!out) throw Error("cannot write " + (dir / "labels.csv").string());
    out << "label\n";
    for (double y : dataset.labels) out << FormatDouble(y) << '\n';
  }
  WriteMetaFeaturesCsv(dir / "metafeatures.csv", meta);
  WriteSplitsJson(dir / "splits.json", dataset.splits);
}

}  // namespace dapr
