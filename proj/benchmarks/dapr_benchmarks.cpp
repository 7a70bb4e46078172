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

#include <benchmark/benchmark.h>

#include <random>

#include "dapr/attribution.hpp"
#include "dapr/autodiff.hpp"
#include "dapr/baselines.hpp"
#include "dapr/models.hpp"

namespace {

using namespace dapr;

Tensor Gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Tensor t(rows, cols);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = normal(rng);
  return t;
}

// Forward plus parameter gradient of an MSE loss; range(0) is the input width.
void BM_MlpBackward(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Mlp model = BuildMlp({p, p / 2, p / 4, 1}, Activation::kRelu, 1);
  const Tensor x = Gaussian(32, static_cast<Eigen::Index>(p), 2);
  const Tensor y = Gaussian(32, 1, 3);
  for (auto _ : state) {
    Graph g;
    const std::vector<Var> params = model.Bind(g);
    const Var loss = Mean(Square(Sub(model.Forward(g.Constant(x), params), g.Constant(y))));
    benchmark::DoNotOptimize(g.Gradient(loss, params));
  }
}
BENCHMARK(BM_MlpBackward)->Arg(52)->Arg(252)->Arg(502);

// One prediction-network step of the attribution prior objective: the
// parameter gradient of the penalty needs second derivatives.
void BM_PenaltyDoubleBackward(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Mlp model = BuildMlp({p, p / 2, p / 4, 1}, Activation::kRelu, 1);
  const Tensor x = Gaussian(32, static_cast<Eigen::Index>(p), 2);
  const Tensor refs = Gaussian(32, static_cast<Eigen::Index>(p), 3);
  const std::vector<double> alphas(32, 0.5);
  const Tensor importance = Tensor::Zero(1, static_cast<Eigen::Index>(p));
  for (auto _ : state) {
    Graph g;
    const std::vector<Var> params = model.Bind(g);
    const Var phi = ExpectedGradientsGraph(g, model, params, x, refs, alphas);
    const Var penalty = AttributionPenalty(Abs(phi), g.Constant(importance));
    benchmark::DoNotOptimize(g.Gradient(penalty, params));
  }
}
BENCHMARK(BM_PenaltyDoubleBackward)->Arg(52)->Arg(252)->Arg(502);

void BM_ExpectedGradients(benchmark::State& state) {
  const Mlp model = BuildMlp({100, 50, 25, 1}, Activation::kRelu, 1);
  const Tensor x = Gaussian(16, 100, 2);
  const Tensor refs = Gaussian(200, 100, 3);
  const AttributionConfig config{static_cast<std::size_t>(state.range(0)), 7};
  for (auto _ : state) benchmark::DoNotOptimize(ExpectedGradientsBatch(model, x, refs, config));
}
BENCHMARK(BM_ExpectedGradients)->Arg(50)->Arg(200);

void BM_LassoFit(benchmark::State& state) {
  const Tensor x = Gaussian(180, state.range(0), 4);
  const Tensor y = Gaussian(180, 1, 5);
  const std::vector<double> yv = ToVector(y);
  const double lambda = 0.05 * LassoLambdaMax(x, yv);
  for (auto _ : state) benchmark::DoNotOptimize(LassoFit(x, yv, lambda));
}
BENCHMARK(BM_LassoFit)->Arg(100)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
