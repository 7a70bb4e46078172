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

#include "dapr/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "dapr/error.hpp"
#include "dapr/rng.hpp"

namespace dapr {
namespace {

void ValidateSizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw InvalidArgument("an Mlp needs at least two layer sizes");
  for (std::size_t s : sizes) {
    if (s == 0) throw InvalidArgument("Mlp layer sizes must be positive");
  }
}

Tensor ApplyActivation(Activation activation, const Tensor& x) {
  switch (activation) {
    case Activation::kRelu:
      return x.cwiseMax(0.0);
    case Activation::kSoftplus:
      return x.unaryExpr([](double v) {
        return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
      });
    case Activation::kTanh:
      return x.array().tanh().matrix();
    case Activation::kIdentity:
      return x;
  }
  return x;
}

Var ApplyActivation(Activation activation, Var x) {
  switch (activation) {
    case Activation::kRelu: return Relu(x);
    case Activation::kSoftplus: return Softplus(x);
    case Activation::kTanh: return Tanh(x);
    case Activation::kIdentity: return x;
  }
  return x;
}

}  // namespace

std::string_view ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kRelu: return "relu";
    case Activation::kSoftplus: return "softplus";
    case Activation::kTanh: return "tanh";
    case Activation::kIdentity: return "identity";
  }
  return "unknown";
}

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "softplus") return Activation::kSoftplus;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes, Activation hidden)
    : sizes_(std::move(layer_sizes)), activation_(hidden) {
  ValidateSizes(sizes_);
  params_.reserve(2 * num_layers());
  for (std::size_t l = 1; l < sizes_.size(); ++l) {
    const auto out = static_cast<Eigen::Index>(sizes_[l]);
    const auto in = static_cast<Eigen::Index>(sizes_[l - 1]);
    params_.push_back(Tensor::Zero(out, in));
    params_.push_back(Tensor::Zero(1, out));
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& p : params_) n += static_cast<std::size_t>(p.size());
  return n;
}

Tensor Mlp::Predict(const Tensor& inputs) const {
  if (static_cast<std::size_t>(inputs.cols()) != input_width()) {
    throw ShapeError("Mlp expects " + std::to_string(input_width()) + " input columns, got " +
                     std::to_string(inputs.cols()));
  }
  Tensor h = inputs;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    Tensor z = h * weight(l).transpose();
    z.rowwise() += bias(l).row(0);
    h = l + 1 < num_layers() ? ApplyActivation(activation_, z) : std::move(z);
  }
  return h;
}

std::vector<Var> Mlp::Bind(Graph& graph, bool requires_grad) const {
  std::vector<Var> vars;
  vars.reserve(params_.size());
  for (const Tensor& p : params_) vars.push_back(graph.Leaf(p, requires_grad));
  return vars;
}

Var Mlp::Forward(Var inputs, std::span<const Var> params) const {
  if (params.size() != params_.size()) {
    throw InvalidArgument("Mlp::Forward expects " + std::to_string(params_.size()) +
                          " bound parameters, got " + std::to_string(params.size()));
  }
  if (static_cast<std::size_t>(inputs.cols()) != input_width()) {
    throw ShapeError("Mlp expects " + std::to_string(input_width()) + " input columns, got " +
                     std::to_string(inputs.cols()));
  }
  Var h = inputs;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    Var z = AddRowVector(MatMul(h, params[2 * l], false, true), params[2 * l + 1]);
    h = l + 1 < num_layers() ? ApplyActivation(activation_, z) : z;
  }
  return h;
}

Mlp BuildMlp(std::vector<std::size_t> layer_sizes, Activation hidden, std::uint64_t seed) {
  Mlp mlp(std::move(layer_sizes), hidden);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& sizes = mlp.layer_sizes();
  for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
    const double fan_in = static_cast<double>(sizes[l]);
    const double fan_out = static_cast<double>(sizes[l + 1]);
    const double stddev = hidden == Activation::kRelu ? std::sqrt(2.0 / fan_in)
                                                      : std::sqrt(2.0 / (fan_in + fan_out));
    Tensor& w = mlp.weight(l);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = stddev * normal(rng);
  }
  return mlp;
}

std::vector<std::size_t> TwoMoonsArchitecture(std::size_t p) {
  return {p, std::max<std::size_t>(p / 2, 1), std::max<std::size_t>(p / 4, 1), 1};
}

LinearPrior LinearPrior::FromMlp(const Mlp& mlp) {
  if (mlp.num_layers() != 1 || mlp.output_width() != 1) {
    throw InvalidArgument("a linear prior is a single-layer Mlp with one output");
  }
  return LinearPrior(ToVector(mlp.weight(0)), mlp.bias(0)(0, 0));
}

Mlp LinearPrior::ToMlp() const {
  Mlp mlp({coefficients_.size(), 1}, Activation::kIdentity);
  mlp.weight(0) = RowVector(coefficients_);
  mlp.bias(0)(0, 0) = intercept_;
  return mlp;
}

double LinearPrior::Predict(std::span<const double> meta_features) const {
  if (meta_features.size() != coefficients_.size()) {
    throw ShapeError("linear prior expects " + std::to_string(coefficients_.size()) +
                     " meta-features, got " + std::to_string(meta_features.size()));
  }
  double out = intercept_;
  for (std::size_t j = 0; j < coefficients_.size(); ++j) out += coefficients_[j] * meta_features[j];
  return out;
}

nlohmann::json MlpToJson(const Mlp& mlp) {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
    const Tensor& w = mlp.weight(l);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      rows.push_back(std::vector<double>(w.row(r).data(), w.row(r).data() + w.cols()));
    }
    weights.push_back(std::move(rows));
    biases.push_back(ToVector(mlp.bias(l)));
  }
  return {{"layer_sizes", mlp.layer_sizes()},
          {"activation", ActivationName(mlp.activation())},
          {"weights", std::move(weights)},
          {"biases", std::move(biases)}};
}

Mlp MlpFromJson(const nlohmann::json& doc) {
  try {
    Mlp mlp(doc.at("layer_sizes").get<std::vector<std::size_t>>(),
            ParseActivation(doc.at("activation").get<std::string>()));
    const auto& weights = doc.at("weights");
    const auto& biases = doc.at("biases");
    if (weights.size() != mlp.num_layers() || biases.size() != mlp.num_layers()) {
      throw InvalidArgument("checkpoint has " + std::to_string(weights.size()) +
                            " weight layers for " + std::to_string(mlp.num_layers()) +
                            " layers");
    }
    for (std::size_t l = 0; l < mlp.num_layers(); ++l) {
      Tensor& w = mlp.weight(l);
      const auto& rows = weights[l];
      if (rows.size() != static_cast<std::size_t>(w.rows())) {
        throw InvalidArgument("checkpoint layer " + std::to_string(l) + " has wrong row count");
      }
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        const auto values = rows[static_cast<std::size_t>(r)].get<std::vector<double>>();
        if (values.size() != static_cast<std::size_t>(w.cols())) {
          throw InvalidArgument("checkpoint layer " + std::to_string(l) +
                                " has wrong column count");
        }
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = values[static_cast<std::size_t>(c)];
      }
      const auto b = biases[l].get<std::vector<double>>();
      if (b.size() != static_cast<std::size_t>(mlp.bias(l).cols())) {
        throw InvalidArgument("checkpoint layer " + std::to_string(l) + " has wrong bias length");
      }
      mlp.bias(l) = RowVector(b);
    }
    for (const Tensor& p : mlp.parameters()) {
      if (!p.allFinite()) throw InvalidArgument("checkpoint contains non-finite parameters");
    }
    return mlp;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed checkpoint: ") + e.what());
  }
}

void SaveMlp(const Mlp& mlp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << MlpToJson(mlp).dump(1) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

Mlp LoadMlp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open checkpoint");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, 0, e.what());
  }
  return MlpFromJson(doc);
}

}  // namespace dapr
