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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dapr/autodiff.hpp"
#include "dapr/error.hpp"
#include "test_util.hpp"

namespace dapr {
namespace {

using testing::RandomTensor;

std::vector<double> LinearLabels(const Tensor& x, const std::vector<double>& w, double noise,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, noise);
  std::vector<double> y(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double s = 0.5;
    for (Eigen::Index c = 0; c < x.cols(); ++c) s += x(r, c) * w[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] = s + normal(rng);
  }
  return y;
}

// Proximal gradient descent on the same objective, used as an oracle.
LinearModel Ista(const Tensor& x, std::span<const double> y, double lambda) {
  const double n = static_cast<double>(x.rows());
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - mean;
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::VectorXd yc = yv.array() - yv.mean();
  const double lipschitz = (xc.transpose() * xc / n).eigenvalues().real().maxCoeff();
  const double step = 1.0 / lipschitz;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd grad = xc.transpose() * (xc * w - yc) / n;
    const Eigen::VectorXd z = w - step * grad;
    w = z.array().sign() * (z.array().abs() - step * lambda).max(0.0);
  }
  LinearModel m;
  m.weights.assign(w.data(), w.data() + w.size());
  m.intercept = yv.mean() - mean.dot(w);
  return m;
}

TEST(LassoTest, LambdaMaxZeroesEveryWeight) {
  std::mt19937_64 rng(1);
  const Tensor x = RandomTensor(rng, 50, 8);
  const std::vector<double> y = LinearLabels(x, {1, -2, 0, 0, 3, 0, 0, 0}, 0.1, rng);
  const double lambda_max = LassoLambdaMax(x, y);
  const LinearModel at_max = LassoFit(x, y, lambda_max, {.standardize = false});
  for (double w : at_max.weights) EXPECT_EQ(w, 0.0);
  double y_mean = 0.0;
  for (double v : y) y_mean += v / 50.0;
  EXPECT_NEAR(at_max.intercept, y_mean, 1e-12);
  const LinearModel below = LassoFit(x, y, 0.99 * lambda_max, {.standardize = false});
  EXPECT_GT(std::count_if(below.weights.begin(), below.weights.end(), [](double w) { return w != 0.0; }), 0);
}

TEST(LassoTest, OrthonormalDesignIsSoftThresholding) {
  // Centered columns with X^T X / n = I: w_j = S(x_j . y / n, lambda).
  std::mt19937_64 rng(2);
  const Eigen::Index n = 40, p = 5;
  Eigen::MatrixXd raw = RandomTensor(rng, n, p);
  raw = raw.rowwise() - raw.colwise().mean();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  const Tensor x = std::sqrt(static_cast<double>(n)) * q;
  const std::vector<double> y = LinearLabels(x, {2.0, -1.0, 0.3, 0.05, 0.0}, 0.2, rng);
  const double lambda = 0.25;
  const LinearModel fit = LassoFit(x, y, lambda, {.standardize = false, .tolerance = 1e-12});
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double z = x.col(j).dot(yv) / static_cast<double>(n);
    const double expected = std::copysign(std::max(std::abs(z) - lambda, 0.0), z);
    EXPECT_NEAR(fit.weights[static_cast<std::size_t>(j)], expected, 1e-10);
  }
}

TEST(LassoTest, MatchesProximalGradientOracle) {
  std::mt19937_64 rng(3);
  const Tensor x = RandomTensor(rng, 60, 12);
  std::vector<double> w(12, 0.0);
  w[0] = 1.5;
  w[4] = -1.0;
  w[9] = 0.5;
  const std::vector<double> y = LinearLabels(x, w, 0.3, rng);
  for (double lambda : {0.01, 0.1, 0.3}) {
    const LinearModel cd = LassoFit(x, y, lambda, {.standardize = false, .tolerance = 1e-12});
    const LinearModel oracle = Ista(x, y, lambda);
    for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(cd.weights[j], oracle.weights[j], 1e-6);
    EXPECT_NEAR(LassoObjective(x, y, cd, lambda), LassoObjective(x, y, oracle, lambda), 1e-10);
  }
}

TEST(LassoTest, ObjectiveNoWorseThanZeroOrLeastSquares) {
  std::mt19937_64 rng(4);
  const Tensor x = RandomTensor(rng, 80, 6);
  const std::vector<double> y = LinearLabels(x, {1, 0, -1, 0, 2, 0}, 0.5, rng);
  const double lambda = 0.05;
  const LinearModel fit = LassoFit(x, y, lambda, {.standardize = false});
  Eigen::MatrixXd design(80, 7);
  design << x, Eigen::VectorXd::Ones(80);
  const Eigen::VectorXd coef =
      design.colPivHouseholderQr().solve(Eigen::Map<const Eigen::VectorXd>(y.data(), 80));
  LinearModel ols{{coef.data(), coef.data() + 6}, coef(6)};
  LinearModel zero{std::vector<double>(6, 0.0), 0.0};
  double y_mean = 0.0;
  for (double v : y) y_mean += v / 80.0;
  zero.intercept = y_mean;
  const double obj = LassoObjective(x, y, fit, lambda);
  EXPECT_LE(obj, LassoObjective(x, y, ols, lambda) + 1e-12);
  EXPECT_LE(obj, LassoObjective(x, y, zero, lambda) + 1e-12);
}

TEST(LassoTest, StandardizedFitIsScaleInvariant) {
  std::mt19937_64 rng(5);
  Tensor x = RandomTensor(rng, 50, 4);
  const std::vector<double> y = LinearLabels(x, {1, -1, 0.5, 0}, 0.1, rng);
  const LinearModel a = LassoFit(x, y, 0.05);
  x.col(2) *= 10.0;
  const LinearModel b = LassoFit(x, y, 0.05);
  EXPECT_NEAR(a.weights[2], 10.0 * b.weights[2], 1e-7);
  EXPECT_NEAR(a.weights[0], b.weights[0], 1e-7);
  EXPECT_THROW(LassoFit(x, y, -1.0), InvalidArgument);
}

TEST(MergeTest, ZeroCouplingIsLeastSquares) {
  std::mt19937_64 rng(6);
  const Tensor x = RandomTensor(rng, 40, 5);
  const std::vector<double> y = LinearLabels(x, {1, 2, 3, 4, 5}, 0.1, rng);
  const Tensor meta = RandomTensor(rng, 5, 2);
  const MergeResult r = MergeFit(x, y, meta, {.coupling = 0.0});
  Eigen::MatrixXd design(40, 6);
  design << x, Eigen::VectorXd::Ones(40);
  const Eigen::VectorXd coef =
      design.colPivHouseholderQr().solve(Eigen::Map<const Eigen::VectorXd>(y.data(), 40));
  for (Eigen::Index j = 0; j < 5; ++j) EXPECT_NEAR(r.model.weights[static_cast<std::size_t>(j)], coef(j), 1e-9);
  EXPECT_NEAR(r.model.intercept, coef(5), 1e-9);
}

TEST(MergeTest, ZeroCouplingBetaRegressesWeightsOnMetaFeatures) {
  std::mt19937_64 rng(16);
  const Tensor x = RandomTensor(rng, 50, 6);
  const std::vector<double> y = LinearLabels(x, {1, -1, 2, 0, 3, -2}, 0.1, rng);
  const Tensor meta = RandomTensor(rng, 6, 2);
  const MergeConfig config{.coupling = 0.0};
  const MergeResult r = MergeFit(x, y, meta, config);
  const Eigen::Map<const Eigen::VectorXd> w(r.model.weights.data(), 6);
  Eigen::MatrixXd system = meta.transpose() * meta;
  system.diagonal().array() += config.ridge;
  const Eigen::VectorXd ridge_beta = system.ldlt().solve(meta.transpose() * w);
  const Eigen::VectorXd ols_beta = Eigen::MatrixXd(meta).colPivHouseholderQr().solve(w);
  for (Eigen::Index j = 0; j < 2; ++j) {
    EXPECT_NEAR(r.beta[static_cast<std::size_t>(j)], ridge_beta(j), 1e-12);
    EXPECT_NEAR(r.beta[static_cast<std::size_t>(j)], ols_beta(j), 1e-5);
  }
}

TEST(MergeTest, LargeCouplingWithIdentityMetaFeaturesTiesWeightsToBeta) {
  std::mt19937_64 rng(17);
  const Tensor x = RandomTensor(rng, 30, 5);
  const std::vector<double> y = LinearLabels(x, {2, -1, 0.5, 0, 1}, 0.1, rng);
  const Tensor meta = Tensor::Identity(5, 5);
  const MergeResult r = MergeFit(x, y, meta, {.coupling = 1e6, .max_iterations = 200});
  double gap = 0.0;
  for (std::size_t j = 0; j < 5; ++j) gap = std::max(gap, std::abs(r.model.weights[j] - r.beta[j]));
  EXPECT_LE(gap, 1e-4);
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] * (1 + 1e-12) + 1e-12);
  }
}

TEST(MergeTest, AlternationDecreasesObjectiveMonotonically) {
  std::mt19937_64 rng(7);
  const Tensor x = RandomTensor(rng, 30, 50);
  const Tensor meta = RandomTensor(rng, 50, 3);
  std::vector<double> w(50);
  for (std::size_t j = 0; j < 50; ++j) w[j] = meta(static_cast<Eigen::Index>(j), 0);
  const std::vector<double> y = LinearLabels(x, w, 0.1, rng);
  const MergeConfig config{.coupling = 0.1, .max_iterations = 200};
  const MergeResult r = MergeFit(x, y, meta, config);
  ASSERT_GE(r.objective_trace.size(), 3u);
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] + 1e-12);
  }
  EXPECT_NEAR(r.objective_trace.back(), MergeObjective(x, y, meta, config, r.model.weights, r.beta),
              1e-12);
}

TEST(MergeTest, ConvergesToTheJointMinimizer) {
  std::mt19937_64 rng(8);
  const Eigen::Index n = 25, p = 10, k = 3;
  const Tensor x = RandomTensor(rng, n, p);
  const Tensor meta = RandomTensor(rng, p, k);
  const std::vector<double> y = LinearLabels(x, std::vector<double>(10, 1.0), 0.3, rng);
  for (double coupling : {0.05, 10.0}) {
    const MergeConfig config{.coupling = coupling, .ridge = 1e-3, .max_iterations = 100000,
                             .tolerance = 1e-13};
    const MergeResult r = MergeFit(x, y, meta, config);
    ASSERT_TRUE(r.converged);
    // Stationarity of the joint quadratic, solved as one block system.
    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    const Eigen::VectorXd yc = yv.array() - yv.mean();
    const Eigen::MatrixXd mm = meta;
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(p + k, p + k);
    block.topLeftCorner(p, p) = xc.transpose() * xc / double(n) + 2 * coupling * Eigen::MatrixXd::Identity(p, p);
    block.topRightCorner(p, k) = -2 * coupling * mm;
    block.bottomLeftCorner(k, p) = -mm.transpose();
    block.bottomRightCorner(k, k) = mm.transpose() * mm + 1e-3 * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + k);
    rhs.head(p) = xc.transpose() * yc / double(n);
    const Eigen::VectorXd joint = block.fullPivLu().solve(rhs);
    for (Eigen::Index j = 0; j < p; ++j) {
      EXPECT_NEAR(r.model.weights[static_cast<std::size_t>(j)], joint(j), 1e-6) << coupling;
    }
    for (Eigen::Index j = 0; j < k; ++j) EXPECT_NEAR(r.beta[static_cast<std::size_t>(j)], joint(p + j), 1e-6);
  }
}

TEST(MergeTest, SingularSystemsAreReported) {
  std::mt19937_64 rng(9);
  const Tensor x = RandomTensor(rng, 10, 30);
  const std::vector<double> y(10, 1.0);
  const Tensor meta = RandomTensor(rng, 30, 2);
  try {
    MergeFit(x, y, meta, {.coupling = 0.0});
    FAIL() << "expected a singular-system error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("coupling"), std::string::npos);
  }
  Tensor rank_one = meta;
  rank_one.col(1) = rank_one.col(0);
  EXPECT_THROW(MergeFit(x, y, rank_one, {.coupling = 1.0, .ridge = 0.0}), Error);
  EXPECT_THROW(MergeFit(x, y, RandomTensor(rng, 29, 2), {}), ShapeError);
}

TEST(NaiveTest, InputWidthAndBound) {
  EXPECT_EQ(NaiveInputWidth(100, 4), 500u);
  EXPECT_THROW(NaiveInputWidth(1000, 4, {.max_input_width = 4999}), InvalidArgument);
  EXPECT_EQ(NaiveInputWidth(1000, 4, {.max_input_width = 5000}), 5000u);
}

TEST(NaiveTest, AppendedBlockIsTheSameFlattenedMatrixInEveryRow) {
  const MetaRegressionData d = GenMetaRegression(30, 10, 4, 0.1, 1);
  const Dataset wide = AppendMetaFeatures(d.dataset, d.meta);
  ASSERT_EQ(wide.num_features(), 50u);
  EXPECT_EQ(wide.feature_names[10], d.dataset.feature_names[0] + ":" + d.meta.names[0]);
  for (Eigen::Index r = 0; r < wide.features.rows(); ++r) {
    EXPECT_TRUE(wide.features.row(r).head(10) == d.dataset.features.row(r));
    for (Eigen::Index i = 0; i < 10; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) EXPECT_EQ(wide.features(r, 10 + i * 4 + j), d.meta.values(i, j));
    }
  }
  wide.Validate();
}

TEST(NaiveTest, AppendedBlockGradientsCarryNoPerSampleSignal) {
  // With constant coordinates c_j the first-layer gradient for column j is
  // c_j times the bias gradient, for every sample: the block adds nothing
  // that distinguishes samples.
  const MetaRegressionData d = GenMetaRegression(40, 10, 2, 0.1, 6);
  const Dataset wide = AppendMetaFeatures(d.dataset, d.meta);
  Mlp model = BuildMlp({30, 6, 1}, Activation::kRelu, 3);
  std::mt19937_64 rng(18);
  for (Tensor& p : model.parameters()) p += RandomTensor(rng, p.rows(), p.cols(), 0.1);
  for (Eigen::Index sample : {0, 7}) {
    Graph graph;
    const std::vector<Var> params = model.Bind(graph);
    const Var x = graph.Constant(wide.features.row(sample));
    const double label = wide.labels[static_cast<std::size_t>(sample)];
    const Var loss = Sum(Square(AddScalar(model.Forward(x, params), -label)));
    const std::vector<Var> grads = graph.Gradient(loss, {params[0], params[1]});
    const Tensor& gw = grads[0].value();
    const Tensor& gb = grads[1].value();
    ASSERT_GT(gb.cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index j = 10; j < 30; ++j) {
      EXPECT_EQ(wide.features(sample, j), wide.features(0, j));
      const Eigen::VectorXd expected = gb.transpose() * wide.features(sample, j);
      EXPECT_LE((gw.col(j) - expected).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(NaiveTest, TrainsAndChecksWidth) {
  const MetaRegressionData d = GenMetaRegression(60, 10, 4, 0.1, 1);
  DaprConfig config;
  config.max_epochs = 3;
  const StandardResult r =
      NaiveMetaFeatureMlp(d.dataset, d.meta, BuildMlp({50, 8, 1}, Activation::kRelu, 1), config);
  EXPECT_EQ(r.model.input_width(), 50u);
  EXPECT_EQ(r.history.epochs.size(), 3u);
  EXPECT_THROW(NaiveMetaFeatureMlp(d.dataset, d.meta, BuildMlp({10, 8, 1}, Activation::kRelu, 1), config),
               ShapeError);
}

TEST(EvaluateLinearTest, UsesPredictions) {
  const MetaRegressionData d = GenMetaRegression(100, 10, 4, 0.0, 3);
  LinearModel truth{d.true_weights, 0.0};
  for (double& w : truth.weights) w /= d.dataset.label_scale;
  truth.intercept = -d.dataset.label_offset / d.dataset.label_scale;
  EXPECT_NEAR(EvaluateLinear(truth, d.dataset, Split::kTest).mse, 0.0, 1e-20);
}

}  // namespace
}  // namespace dapr
