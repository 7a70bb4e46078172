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

#include "dapr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dapr/error.hpp"

namespace dapr {
namespace {

using Vector = Eigen::VectorXd;

Vector ToEigen(std::span<const double> v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void CheckInputs(const Tensor& x, std::span<const double> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw ShapeError("design has " + std::to_string(x.rows()) + " rows but " +
                     std::to_string(y.size()) + " responses");
  }
  if (x.rows() == 0) throw InvalidArgument("empty design");
  if (!x.allFinite() || !ToEigen(y).allFinite()) throw NumericError("non-finite input");
}

double SoftThreshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

std::vector<double> LinearModel::Predict(const Tensor& inputs) const {
  if (static_cast<std::size_t>(inputs.cols()) != weights.size()) {
    throw ShapeError("linear model expects " + std::to_string(weights.size()) + " columns");
  }
  const Vector out = (inputs * ToEigen(weights)).array() + intercept;
  return {out.data(), out.data() + out.size()};
}

double LassoObjective(const Tensor& x, std::span<const double> y, const LinearModel& model,
                      double lambda) {
  CheckInputs(x, y);
  const Vector r = ToEigen(y) - (x * ToEigen(model.weights)).array().matrix() -
                   Vector::Constant(x.rows(), model.intercept);
  return r.squaredNorm() / (2.0 * static_cast<double>(x.rows())) +
         lambda * ToEigen(model.weights).lpNorm<1>();
}

double LassoLambdaMax(const Tensor& x, std::span<const double> y) {
  CheckInputs(x, y);
  const Vector yc = ToEigen(y).array() - ToEigen(y).mean();
  const Tensor xc = x.rowwise() - x.colwise().mean();
  return (xc.transpose() * yc).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

LinearModel LassoFit(const Tensor& x, std::span<const double> y, double lambda,
                     const LassoOptions& options) {
  CheckInputs(x, y);
  if (!(lambda >= 0.0)) throw InvalidArgument("lasso lambda must be >= 0");
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double nd = static_cast<double>(n);

  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::RowVectorXd scale = Eigen::RowVectorXd::Ones(p);
  // Column-major copy: coordinate descent walks columns.
  Eigen::MatrixXd z = x.rowwise() - mean;
  if (options.standardize) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double sd = std::sqrt(z.col(j).squaredNorm() / nd);
      scale(j) = sd > 0.0 ? sd : 1.0;
      z.col(j) /= scale(j);
    }
  }
  const double y_mean = ToEigen(y).mean();
  const Vector yc = ToEigen(y).array() - y_mean;
  Vector curvature(p);
  for (Eigen::Index j = 0; j < p; ++j) curvature(j) = z.col(j).squaredNorm() / nd;

  Vector w = Vector::Zero(p);
  Vector r = yc;
  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (curvature(j) == 0.0) continue;
      const double rho = z.col(j).dot(r) / nd + curvature(j) * w(j);
      const double updated = SoftThreshold(rho, lambda) / curvature(j);
      const double delta = updated - w(j);
      if (delta != 0.0) {
        r -= delta * z.col(j);
        w(j) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < options.tolerance) {
      // Duality gap with the residual rescaled into the dual-feasible set.
      const double corr = (z.transpose() * r).cwiseAbs().maxCoeff() / nd;
      const double s = corr > lambda && corr > 0.0 ? lambda / corr : 1.0;
      const double primal = r.squaredNorm() / (2.0 * nd) + lambda * w.lpNorm<1>();
      const Vector theta = s * r / nd;
      const double dual = yc.squaredNorm() / (2.0 * nd) - 0.5 * nd * (theta - yc / nd).squaredNorm();
      if (primal - dual < options.tolerance) break;
    }
  }

  LinearModel model;
  model.weights.resize(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) model.weights[static_cast<std::size_t>(j)] = w(j) / scale(j);
  model.intercept = y_mean - mean.dot(ToEigen(model.weights));
  return model;
}

double MergeObjective(const Tensor& x, std::span<const double> y, const Tensor& meta,
                      const MergeConfig& config, std::span<const double> w,
                      std::span<const double> beta) {
  const Tensor xc = x.rowwise() - x.colwise().mean();
  const Vector yc = ToEigen(y).array() - ToEigen(y).mean();
  const Vector wv = ToEigen(w);
  const Vector bv = ToEigen(beta);
  const double fit = (yc - xc * wv).squaredNorm() / (2.0 * static_cast<double>(x.rows()));
  return fit + config.coupling * ((wv - meta * bv).squaredNorm() + config.ridge * bv.squaredNorm());
}

MergeResult MergeFit(const Tensor& x, std::span<const double> y, const Tensor& meta,
                     const MergeConfig& config) {
  CheckInputs(x, y);
  if (meta.rows() != x.cols()) {
    throw ShapeError("meta-feature matrix has " + std::to_string(meta.rows()) + " rows for " +
                     std::to_string(x.cols()) + " features");
  }
  if (!(config.coupling >= 0.0)) throw InvalidArgument("merge coupling must be >= 0");
  if (!(config.tolerance > 0.0)) throw InvalidArgument("merge tolerance must be > 0");
  if (!(config.ridge >= 0.0)) throw InvalidArgument("merge ridge must be >= 0");
  const Eigen::Index p = x.cols();
  const Eigen::Index k = meta.cols();
  const double nd = static_cast<double>(x.rows());

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - mean;
  const double y_mean = ToEigen(y).mean();
  const Vector yc = ToEigen(y).array() - y_mean;
  const Eigen::MatrixXd mm = meta;

  Eigen::MatrixXd w_system = xc.transpose() * xc / nd;
  w_system.diagonal().array() += 2.0 * config.coupling;
  const Vector xty = xc.transpose() * yc / nd;
  const Eigen::LDLT<Eigen::MatrixXd> w_solver(w_system);
  Eigen::MatrixXd b_system = mm.transpose() * mm;
  b_system.diagonal().array() += config.ridge;
  const Eigen::LDLT<Eigen::MatrixXd> b_solver(b_system);

  auto singular = [](const Eigen::LDLT<Eigen::MatrixXd>& solver) {
    if (solver.info() != Eigen::Success || !solver.isPositive()) return true;
    const Vector d = solver.vectorD().cwiseAbs();
    return d.size() > 0 && d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff());
  };
  if (singular(w_solver)) {
    throw Error("merge: singular weight system; increase the coupling or add ridge");
  }
  if (singular(b_solver)) {
    throw Error("merge: singular meta-feature system; increase the ridge");
  }

  MergeResult result;
  Vector w = Vector::Zero(p);
  Vector beta = Vector::Zero(k);
  auto objective = [&] {
    const double fit = (yc - xc * w).squaredNorm() / (2.0 * nd);
    return fit + config.coupling * ((w - mm * beta).squaredNorm() + config.ridge * beta.squaredNorm());
  };
  result.objective_trace.push_back(objective());
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const Vector previous = w;
    w = w_solver.solve(xty + 2.0 * config.coupling * (mm * beta));
    result.objective_trace.push_back(objective());
    beta = b_solver.solve(mm.transpose() * w);
    result.objective_trace.push_back(objective());
    result.iterations = it + 1;
    if ((w - previous).cwiseAbs().maxCoeff() < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  if (!w.allFinite() || !beta.allFinite()) throw NumericError("merge: non-finite solution");
  result.model.weights.assign(w.data(), w.data() + w.size());
  result.model.intercept = y_mean - mean.dot(w);
  result.beta.assign(beta.data(), beta.data() + beta.size());
  return result;
}

Dataset AppendMetaFeatures(const Dataset& dataset, const MetaFeatureMatrix& meta,
                           const NaiveConfig& config) {
  if (meta.num_features() != dataset.num_features()) {
    throw InvalidArgument("meta-feature matrix has " + std::to_string(meta.num_features()) +
                          " rows for " + std::to_string(dataset.num_features()) + " features");
  }
  const std::size_t p = dataset.num_features();
  const std::size_t extra = NaiveInputWidth(p, meta.width(), config) - p;
  Dataset out = dataset;
  out.features.resize(dataset.features.rows(), static_cast<Eigen::Index>(p + extra));
  out.features.leftCols(static_cast<Eigen::Index>(p)) = dataset.features;
  const Eigen::Map<const Eigen::RowVectorXd> flat(meta.values.data(), meta.values.size());
  out.features.rightCols(static_cast<Eigen::Index>(extra)).rowwise() = flat;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < meta.width(); ++j) {
      out.feature_names.push_back(meta.feature_names[i] + ":" + meta.names[j]);
    }
  }
  return out;
}

std::size_t NaiveInputWidth(std::size_t p, std::size_t k, const NaiveConfig& config) {
  const std::size_t width = p + p * k;
  if (width > config.max_input_width) {
    throw InvalidArgument("naive meta-feature input width " + std::to_string(width) +
                          " exceeds the bound " + std::to_string(config.max_input_width));
  }
  return width;
}

StandardResult NaiveMetaFeatureMlp(const Dataset& dataset, const MetaFeatureMatrix& meta,
                                   Mlp model, const DaprConfig& config,
                                   const NaiveConfig& naive) {
  Dataset augmented = AppendMetaFeatures(dataset, meta, naive);
  if (model.input_width() != augmented.num_features()) {
    throw ShapeError("naive model expects " + std::to_string(model.input_width()) +
                     " inputs but the augmented data has " +
                     std::to_string(augmented.num_features()));
  }
  return TrainStandard(augmented, std::move(model), config);
}

Metrics EvaluateLinear(const LinearModel& model, const Dataset& dataset, Split split) {
  const Tensor x = dataset.Features(split);
  if (x.rows() == 0) throw InvalidArgument("split '" + std::string(SplitName(split)) + "' is empty");
  return EvaluatePredictions(dataset.task, model.Predict(x), dataset.Labels(split));
}

}  // namespace dapr
