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

#include "dapr/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "dapr/error.hpp"

namespace dapr {
namespace {

double StableSoftplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double StableSigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool IsBinary(Op op) {
  switch (op) {
    case Op::kMatMul:
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kAddRowVector:
      return true;
    default:
      return false;
  }
}

Graph& Owner(Var a, Var b = {}) {
  if (!a.valid()) throw InvalidArgument("operation on an unbound Var");
  if (b.valid() && b.graph() != a.graph()) {
    throw InvalidArgument("operands belong to different graphs");
  }
  return *a.graph();
}

}  // namespace

std::string_view OpName(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kMatMul: return "matmul";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kAddRowVector: return "add_row_vector";
    case Op::kSumRows: return "sum_rows";
    case Op::kBroadcastRows: return "broadcast_rows";
    case Op::kSum: return "sum";
    case Op::kFill: return "fill";
    case Op::kScale: return "scale";
    case Op::kAddScalar: return "add_scalar";
    case Op::kRelu: return "relu";
    case Op::kSoftplus: return "softplus";
    case Op::kSigmoid: return "sigmoid";
    case Op::kTanh: return "tanh";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kAbs: return "abs";
    case Op::kSmoothAbs: return "smooth_abs";
    case Op::kReciprocal: return "reciprocal";
    case Op::kSquare: return "square";
    case Op::kTranspose: return "transpose";
    case Op::kReluMask: return "relu_mask";
    case Op::kSign: return "sign";
  }
  return "unknown";
}

const Tensor& Var::value() const { return graph_->value(*this); }

Var Graph::Leaf(Tensor value, bool requires_grad) {
  if (!value.allFinite()) {
    throw NumericError("node #" + std::to_string(nodes_.size()) +
                       " (leaf): non-finite input value");
  }
  Node node;
  node.op = Op::kLeaf;
  node.requires_grad = requires_grad;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::Apply(Op op, Var a, Var b, Attrs attrs) {
  Node node;
  node.op = op;
  node.lhs = a.id();
  if (IsBinary(op)) {
    if (!b.valid()) throw InvalidArgument(std::string(OpName(op)) + " needs two operands");
    node.rhs = b.id();
  }
  node.attrs = attrs;
  const bool differentiable = op != Op::kReluMask && op != Op::kSign;
  node.requires_grad =
      differentiable && (nodes_[node.lhs].requires_grad ||
                         (node.rhs != kNone && nodes_[node.rhs].requires_grad));
  node.value = Evaluate(node);
  if (!node.value.allFinite()) {
    throw NumericError("node #" + std::to_string(nodes_.size()) + " (" +
                       std::string(OpName(op)) + "): non-finite result");
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Tensor Graph::Evaluate(const Node& node) const {
  const Tensor& a = nodes_[node.lhs].value;
  const Attrs& at = node.attrs;
  auto shape_error = [&](const std::string& detail) {
    return ShapeError("node #" + std::to_string(nodes_.size()) + " (" +
                      std::string(OpName(node.op)) + "): " + detail);
  };
  auto require_same = [&](const Tensor& x, const Tensor& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
      throw shape_error("operand shapes differ: " + ShapeString(x) + " vs " + ShapeString(y));
    }
  };

  switch (node.op) {
    case Op::kMatMul: {
      const Tensor& b = nodes_[node.rhs].value;
      const Eigen::Index inner_a = at.trans_a ? a.rows() : a.cols();
      const Eigen::Index inner_b = at.trans_b ? b.cols() : b.rows();
      if (inner_a != inner_b) {
        throw shape_error("inner dimensions differ: " + ShapeString(a) +
                          (at.trans_a ? "^T" : "") + " * " + ShapeString(b) +
                          (at.trans_b ? "^T" : ""));
      }
      if (at.trans_a && at.trans_b) return a.transpose() * b.transpose();
      if (at.trans_a) return a.transpose() * b;
      if (at.trans_b) return a * b.transpose();
      return a * b;
    }
    case Op::kAdd: {
      const Tensor& b = nodes_[node.rhs].value;
      require_same(a, b);
      return a + b;
    }
    case Op::kSub: {
      const Tensor& b = nodes_[node.rhs].value;
      require_same(a, b);
      return a - b;
    }
    case Op::kMul: {
      const Tensor& b = nodes_[node.rhs].value;
      require_same(a, b);
      return a.cwiseProduct(b);
    }
    case Op::kAddRowVector: {
      const Tensor& row = nodes_[node.rhs].value;
      if (row.rows() != 1 || row.cols() != a.cols()) {
        throw shape_error("row vector " + ShapeString(row) + " does not match " + ShapeString(a));
      }
      Tensor out = a;
      out.rowwise() += row.row(0);
      return out;
    }
    case Op::kSumRows:
      return a.colwise().sum();
    case Op::kBroadcastRows:
      if (a.rows() != 1) throw shape_error("expected a row vector, got " + ShapeString(a));
      return a.replicate(at.rows, 1);
    case Op::kSum:
      return Scalar(a.sum());
    case Op::kFill:
      if (a.size() != 1) throw shape_error("expected a scalar, got " + ShapeString(a));
      return Tensor::Constant(at.rows, at.cols, a(0, 0));
    case Op::kScale:
      return at.scalar * a;
    case Op::kAddScalar:
      return (a.array() + at.scalar).matrix();
    case Op::kRelu:
      return a.cwiseMax(0.0);
    case Op::kSoftplus:
      return a.unaryExpr([](double x) { return StableSoftplus(x); });
    case Op::kSigmoid:
      return a.unaryExpr([](double x) { return StableSigmoid(x); });
    case Op::kTanh:
      return a.array().tanh().matrix();
    case Op::kExp:
      return a.array().exp().matrix();
    case Op::kLog:
      return a.array().log().matrix();
    case Op::kAbs:
      return a.cwiseAbs();
    case Op::kSmoothAbs: {
      const double eps2 = at.scalar * at.scalar;
      return a.unaryExpr([eps2](double x) { return std::sqrt(x * x + eps2); });
    }
    case Op::kReciprocal:
      return a.cwiseInverse();
    case Op::kSquare:
      return a.cwiseAbs2();
    case Op::kTranspose:
      return a.transpose();
    case Op::kReluMask:
      return a.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
    case Op::kSign:
      return a.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
    case Op::kLeaf:
      break;
  }
  throw shape_error("cannot evaluate");
}

// Expresses the vector-Jacobian product of node id with the upstream
// gradient as new graph nodes. Only inputs that need a gradient receive one;
// the caller ignores the other output.
void Graph::Backward(std::size_t id, Var gy, Var& grad_lhs, Var& grad_rhs) {
  // Copy: Apply() may reallocate nodes_.
  const Node node = [&] {
    Node n;
    n.op = nodes_[id].op;
    n.lhs = nodes_[id].lhs;
    n.rhs = nodes_[id].rhs;
    n.attrs = nodes_[id].attrs;
    return n;
  }();
  const Var a(this, node.lhs);
  const Var b = node.rhs == kNone ? Var() : Var(this, node.rhs);
  const Var out(this, id);
  const bool need_a = nodes_[node.lhs].requires_grad;
  const bool need_b = node.rhs != kNone && nodes_[node.rhs].requires_grad;

  switch (node.op) {
    case Op::kMatMul: {
      const bool ta = node.attrs.trans_a;
      const bool tb = node.attrs.trans_b;
      if (!ta && !tb) {
        if (need_a) grad_lhs = MatMul(gy, b, false, true);
        if (need_b) grad_rhs = MatMul(a, gy, true, false);
      } else if (!ta && tb) {
        if (need_a) grad_lhs = MatMul(gy, b);
        if (need_b) grad_rhs = MatMul(gy, a, true, false);
      } else if (ta && !tb) {
        if (need_a) grad_lhs = MatMul(b, gy, false, true);
        if (need_b) grad_rhs = MatMul(a, gy);
      } else {
        if (need_a) grad_lhs = MatMul(b, gy, true, true);
        if (need_b) grad_rhs = MatMul(gy, a, true, true);
      }
      return;
    }
    case Op::kAdd:
      grad_lhs = gy;
      grad_rhs = gy;
      return;
    case Op::kSub:
      grad_lhs = gy;
      if (need_b) grad_rhs = Scale(gy, -1.0);
      return;
    case Op::kMul:
      if (need_a) grad_lhs = Mul(gy, b);
      if (need_b) grad_rhs = Mul(gy, a);
      return;
    case Op::kAddRowVector:
      grad_lhs = gy;
      if (need_b) grad_rhs = SumRows(gy);
      return;
    case Op::kSumRows:
      grad_lhs = BroadcastRows(gy, nodes_[node.lhs].value.rows());
      return;
    case Op::kBroadcastRows:
      grad_lhs = SumRows(gy);
      return;
    case Op::kSum:
      grad_lhs = Fill(gy, nodes_[node.lhs].value.rows(), nodes_[node.lhs].value.cols());
      return;
    case Op::kFill:
      grad_lhs = Sum(gy);
      return;
    case Op::kScale:
      grad_lhs = Scale(gy, node.attrs.scalar);
      return;
    case Op::kAddScalar:
      grad_lhs = gy;
      return;
    case Op::kRelu:
      grad_lhs = Mul(gy, ReluMask(a));
      return;
    case Op::kSoftplus:
      grad_lhs = Mul(gy, Sigmoid(a));
      return;
    case Op::kSigmoid:
      grad_lhs = Mul(gy, Sub(out, Square(out)));
      return;
    case Op::kTanh:
      grad_lhs = Mul(gy, AddScalar(Scale(Square(out), -1.0), 1.0));
      return;
    case Op::kExp:
      grad_lhs = Mul(gy, out);
      return;
    case Op::kLog:
      grad_lhs = Mul(gy, Reciprocal(a));
      return;
    case Op::kAbs:
      grad_lhs = Mul(gy, Sign(a));
      return;
    case Op::kSmoothAbs:
      grad_lhs = Mul(gy, Mul(a, Reciprocal(out)));
      return;
    case Op::kReciprocal:
      grad_lhs = Scale(Mul(gy, Square(out)), -1.0);
      return;
    case Op::kSquare:
      grad_lhs = Scale(Mul(gy, a), 2.0);
      return;
    case Op::kTranspose:
      grad_lhs = Transpose(gy);
      return;
    case Op::kReluMask:
    case Op::kSign:
    case Op::kLeaf:
      return;
  }
}

std::vector<Var> Graph::Gradient(Var target, std::span<const Var> wrt) {
  if (target.graph() != this) throw InvalidArgument("gradient target belongs to another graph");
  if (value(target).size() != 1) {
    throw ShapeError("gradient target node #" + std::to_string(target.id()) +
                     " must be scalar, got " + ShapeString(value(target)));
  }
  const std::size_t end = target.id() + 1;

  // Nodes lying on a path from some wrt node to the target.
  std::vector<char> depends(end, 0);
  std::size_t first = end;
  for (const Var& w : wrt) {
    if (w.graph() != this) throw InvalidArgument("gradient wrt node belongs to another graph");
    if (w.id() < end) {
      depends[w.id()] = 1;
      first = std::min(first, w.id());
    }
  }
  for (std::size_t i = first; i < end; ++i) {
    const Node& n = nodes_[i];
    if (depends[i] || n.op == Op::kLeaf || !n.requires_grad) continue;
    if (depends[n.lhs] || (n.rhs != kNone && depends[n.rhs])) depends[i] = 1;
  }

  std::vector<std::optional<Var>> adjoint(end);
  if (depends[target.id()]) adjoint[target.id()] = Constant(Scalar(1.0));

  for (std::size_t i = end; i-- > first;) {
    if (!adjoint[i] || !depends[i] || nodes_[i].op == Op::kLeaf) continue;
    Var grad_lhs;
    Var grad_rhs;
    Backward(i, *adjoint[i], grad_lhs, grad_rhs);
    const std::size_t lhs = nodes_[i].lhs;
    const std::size_t rhs = nodes_[i].rhs;
    auto accumulate = [&](std::size_t input, Var g) {
      if (!g.valid() || !depends[input]) return;
      adjoint[input] = adjoint[input] ? Add(*adjoint[input], g) : g;
    };
    accumulate(lhs, grad_lhs);
    if (rhs != kNone) accumulate(rhs, grad_rhs);
  }

  std::vector<Var> result;
  result.reserve(wrt.size());
  for (const Var& w : wrt) {
    if (w.id() < end && adjoint[w.id()]) {
      result.push_back(*adjoint[w.id()]);
    } else {
      const Tensor& v = value(w);
      result.push_back(Constant(Tensor::Zero(v.rows(), v.cols())));
    }
  }
  return result;
}

Var MatMul(Var a, Var b, bool trans_a, bool trans_b) {
  Graph::Attrs attrs;
  attrs.trans_a = trans_a;
  attrs.trans_b = trans_b;
  return Owner(a, b).Apply(Op::kMatMul, a, b, attrs);
}
Var Add(Var a, Var b) { return Owner(a, b).Apply(Op::kAdd, a, b); }
Var Sub(Var a, Var b) { return Owner(a, b).Apply(Op::kSub, a, b); }
Var Mul(Var a, Var b) { return Owner(a, b).Apply(Op::kMul, a, b); }
Var AddRowVector(Var a, Var row) { return Owner(a, row).Apply(Op::kAddRowVector, a, row); }
Var SumRows(Var a) { return Owner(a).Apply(Op::kSumRows, a); }
Var BroadcastRows(Var row, Eigen::Index rows) {
  Graph::Attrs attrs;
  attrs.rows = rows;
  return Owner(row).Apply(Op::kBroadcastRows, row, {}, attrs);
}
Var Sum(Var a) { return Owner(a).Apply(Op::kSum, a); }
Var Mean(Var a) { return Scale(Sum(a), 1.0 / static_cast<double>(a.value().size())); }
Var Fill(Var scalar, Eigen::Index rows, Eigen::Index cols) {
  Graph::Attrs attrs;
  attrs.rows = rows;
  attrs.cols = cols;
  return Owner(scalar).Apply(Op::kFill, scalar, {}, attrs);
}
Var Scale(Var a, double factor) {
  Graph::Attrs attrs;
  attrs.scalar = factor;
  return Owner(a).Apply(Op::kScale, a, {}, attrs);
}
Var AddScalar(Var a, double offset) {
  Graph::Attrs attrs;
  attrs.scalar = offset;
  return Owner(a).Apply(Op::kAddScalar, a, {}, attrs);
}
Var Relu(Var a) { return Owner(a).Apply(Op::kRelu, a); }
Var Softplus(Var a) { return Owner(a).Apply(Op::kSoftplus, a); }
Var Sigmoid(Var a) { return Owner(a).Apply(Op::kSigmoid, a); }
Var Tanh(Var a) { return Owner(a).Apply(Op::kTanh, a); }
Var Exp(Var a) { return Owner(a).Apply(Op::kExp, a); }
Var Log(Var a) { return Owner(a).Apply(Op::kLog, a); }
Var Abs(Var a) { return Owner(a).Apply(Op::kAbs, a); }
Var SmoothAbs(Var a, double eps) {
  Graph::Attrs attrs;
  attrs.scalar = eps;
  return Owner(a).Apply(Op::kSmoothAbs, a, {}, attrs);
}
Var Reciprocal(Var a) { return Owner(a).Apply(Op::kReciprocal, a); }
Var Square(Var a) { return Owner(a).Apply(Op::kSquare, a); }
Var Transpose(Var a) { return Owner(a).Apply(Op::kTranspose, a); }
Var ReluMask(Var a) { return Owner(a).Apply(Op::kReluMask, a); }
Var Sign(Var a) { return Owner(a).Apply(Op::kSign, a); }

AdamState::AdamState(AdamOptions opts, std::span<const Tensor> params) : options(opts) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (const Tensor& p : params) {
    first_moment.push_back(Tensor::Zero(p.rows(), p.cols()));
    second_moment.push_back(Tensor::Zero(p.rows(), p.cols()));
  }
}

void AdamStep(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw ShapeError("adam: parameter, gradient, and state counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (p.rows() != grads[i].rows() || p.cols() != grads[i].cols() ||
        p.rows() != state.first_moment[i].rows() || p.cols() != state.first_moment[i].cols()) {
      throw ShapeError("adam: shape mismatch for parameter " + std::to_string(i) + ": " +
                       ShapeString(p) + " vs gradient " + ShapeString(grads[i]));
    }
  }
  const AdamOptions& o = state.options;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    const Tensor& g = grads[i];
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.cwiseAbs2();
    params[i].array() -= o.learning_rate * (m.array() / correction1) /
                         ((v.array() / correction2).sqrt() + o.epsilon);
  }
}

}  // namespace dapr
