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

#ifndef DAPR_MODELS_HPP_
#define DAPR_MODELS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dapr/autodiff.hpp"
#include "dapr/tensor.hpp"

namespace dapr {

enum class Activation { kRelu, kSoftplus, kTanh, kIdentity };

std::string_view ActivationName(Activation activation);
// Throws InvalidArgument for unknown names.
Activation ParseActivation(std::string_view name);

// Fully connected network. Layer l maps d_{l-1} -> d_l with weight W_l of
// shape d_l x d_{l-1} and bias b_l of shape 1 x d_l. Hidden layers apply the
// configured activation; the output layer is always the identity (a raw
// regression value, a logit, or a prior's predicted importance).
class Mlp {
 public:
  Mlp() = default;
  // Zero-initialized network. Throws InvalidArgument for fewer than two
  // sizes or a zero size.
  Mlp(std::vector<std::size_t> layer_sizes, Activation hidden);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t input_width() const { return sizes_.front(); }
  std::size_t output_width() const { return sizes_.back(); }
  std::size_t num_layers() const { return sizes_.size() - 1; }
  Activation activation() const { return activation_; }

  Tensor& weight(std::size_t layer) { return params_[2 * layer]; }
  const Tensor& weight(std::size_t layer) const { return params_[2 * layer]; }
  Tensor& bias(std::size_t layer) { return params_[2 * layer + 1]; }
  const Tensor& bias(std::size_t layer) const { return params_[2 * layer + 1]; }

  // Flat parameter list W_1, b_1, W_2, b_2, ...
  std::vector<Tensor>& parameters() { return params_; }
  const std::vector<Tensor>& parameters() const { return params_; }
  std::size_t parameter_count() const;

  // Plain evaluation, one output row per input row. Throws ShapeError when
  // the column count differs from input_width().
  Tensor Predict(const Tensor& inputs) const;

  // Binds the parameters as graph leaves, in parameters() order.
  std::vector<Var> Bind(Graph& graph, bool requires_grad = true) const;
  // Differentiable forward pass using previously bound parameters.
  Var Forward(Var inputs, std::span<const Var> params) const;

 private:
  std::vector<std::size_t> sizes_;
  Activation activation_ = Activation::kRelu;
  std::vector<Tensor> params_;
};

// Builds an Mlp with seeded initialization: He normal (std sqrt(2/fan_in))
// when the hidden activation is relu, Glorot normal
// (std sqrt(2/(fan_in+fan_out))) otherwise. Biases start at zero.
Mlp BuildMlp(std::vector<std::size_t> layer_sizes, Activation hidden, std::uint64_t seed);

// Two hidden layers of floor(p/2) and floor(p/4) units (at least one each)
// and a single output.
std::vector<std::size_t> TwoMoonsArchitecture(std::size_t p);

// Linear prior g(m) = beta . m + beta_0 on k meta-features.
class LinearPrior {
 public:
  LinearPrior() = default;
  LinearPrior(std::vector<double> coefficients, double intercept)
      : coefficients_(std::move(coefficients)), intercept_(intercept) {}

  // Reads beta from a [k, 1] Mlp. Throws InvalidArgument for other shapes.
  static LinearPrior FromMlp(const Mlp& mlp);
  Mlp ToMlp() const;

  const std::vector<double>& coefficients() const { return coefficients_; }
  double intercept() const { return intercept_; }
  std::size_t width() const { return coefficients_.size(); }

  double Predict(std::span<const double> meta_features) const;

 private:
  std::vector<double> coefficients_;
  double intercept_ = 0.0;
};

// Checkpoint document: {layer_sizes, activation, weights, biases}.
nlohmann::json MlpToJson(const Mlp& mlp);
// Throws InvalidArgument when the document is malformed.
Mlp MlpFromJson(const nlohmann::json& doc);
void SaveMlp(const Mlp& mlp, const std::filesystem::path& path);
Mlp LoadMlp(const std::filesystem::path& path);

}  // namespace dapr

#endif  // DAPR_MODELS_HPP_
