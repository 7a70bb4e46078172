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

// Reverse-mode automatic differentiation over dense tensors.
//
// Graphs are built eagerly (define-by-run): every operation evaluates its
// value immediately and appends a node, so node ids are a topological order.
// Backward rules are themselves expressed with graph operations, which makes
// the gradients returned by Gradient() ordinary nodes that can be
// differentiated again. Training the attribution penalty relies on this:
// the penalty contains input gradients of the prediction network and its
// parameter gradient is a mixed second derivative.
//
// Usage:
//   Graph g;
//   Var x = g.Leaf(Scalar(2.0));
//   Var y = Mul(Mul(x, x), x);
//   Var dy = g.Gradient(y, {x})[0];     // 3x^2 = 12, still a graph node
//   Var d2y = g.Gradient(dy, {x})[0];   // 6x = 12

#ifndef DAPR_AUTODIFF_HPP_
#define DAPR_AUTODIFF_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "dapr/tensor.hpp"

namespace dapr {

enum class Op : std::uint8_t {
  kLeaf,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kAddRowVector,
  kSumRows,
  kBroadcastRows,
  kSum,
  kFill,
  kScale,
  kAddScalar,
  kRelu,
  kSoftplus,
  kSigmoid,
  kTanh,
  kExp,
  kLog,
  kAbs,
  kSmoothAbs,
  kReciprocal,
  kSquare,
  kTranspose,
  // Piecewise-constant helpers; their derivative is zero almost everywhere.
  kReluMask,
  kSign,
};

std::string_view OpName(Op op);

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;

  Graph* graph() const { return graph_; }
  std::size_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  const Tensor& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }

 private:
  friend class Graph;
  Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

// Static attributes of an operation (scale factor, target shape, ...).
struct OpAttrs {
  double scalar = 0.0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  bool trans_a = false;
  bool trans_b = false;
};

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  // Binds an input or parameter. Leaves with requires_grad = false are
  // constants: Gradient() never propagates into them.
  Var Leaf(Tensor value, bool requires_grad = true);
  Var Constant(Tensor value) { return Leaf(std::move(value), false); }

  const Tensor& value(Var v) const { return nodes_[v.id()].value; }
  Op op(Var v) const { return nodes_[v.id()].op; }
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient of the scalar node target with respect to each of wrt. The
  // results are graph nodes, so Gradient() may be applied to expressions
  // built from them. A wrt node that target does not depend on yields a
  // zero tensor of its shape. Throws ShapeError if target is not 1 x 1.
  std::vector<Var> Gradient(Var target, std::span<const Var> wrt);
  std::vector<Var> Gradient(Var target, std::initializer_list<Var> wrt) {
    return Gradient(target, std::span<const Var>(wrt.begin(), wrt.size()));
  }

  using Attrs = OpAttrs;

  // Appends a node computed from its inputs. Used by the free operator
  // functions below; throws ShapeError / NumericError naming the node.
  Var Apply(Op op, Var a, Var b = {}, Attrs attrs = {});

 private:
  struct Node {
    Op op = Op::kLeaf;
    std::size_t lhs = kNone;
    std::size_t rhs = kNone;
    Attrs attrs;
    bool requires_grad = false;
    Tensor value;
  };
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  Tensor Evaluate(const Node& node) const;
  void Backward(std::size_t id, Var upstream, Var& grad_lhs, Var& grad_rhs);

  std::vector<Node> nodes_;
};

// Matrix product op(a) * op(b), where op transposes when requested.
Var MatMul(Var a, Var b, bool trans_a = false, bool trans_b = false);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
// Elementwise product.
Var Mul(Var a, Var b);
// Adds the 1 x n row to every row of the m x n matrix a.
Var AddRowVector(Var a, Var row);
// m x n -> 1 x n column sums.
Var SumRows(Var a);
// 1 x n -> rows x n.
Var BroadcastRows(Var row, Eigen::Index rows);
// Sum of all entries, as a 1 x 1 node.
Var Sum(Var a);
Var Mean(Var a);
// 1 x 1 -> rows x cols filled with the scalar.
Var Fill(Var scalar, Eigen::Index rows, Eigen::Index cols);
Var Scale(Var a, double factor);
Var AddScalar(Var a, double offset);
Var Relu(Var a);
Var Softplus(Var a);
Var Sigmoid(Var a);
Var Tanh(Var a);
Var Exp(Var a);
Var Log(Var a);
// |a| with subgradient sign(0) = 0.
Var Abs(Var a);
// sqrt(a^2 + eps^2): a differentiable stand-in for |a|.
Var SmoothAbs(Var a, double eps);
Var Reciprocal(Var a);
Var Square(Var a);
Var Transpose(Var a);
Var ReluMask(Var a);
Var Sign(Var a);

inline Var operator+(Var a, Var b) { return Add(a, b); }
inline Var operator-(Var a, Var b) { return Sub(a, b); }
inline Var operator*(double c, Var a) { return Scale(a, c); }

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamOptions options;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(AdamOptions opts, std::span<const Tensor> params);
};

// One bias-corrected Adam update of params in place; params[i] pairs with
// grads[i]. Throws ShapeError if
// params, grads, and state disagree.
void AdamStep(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state);

}  // namespace dapr

#endif  // DAPR_AUTODIFF_HPP_
