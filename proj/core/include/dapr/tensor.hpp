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

#ifndef DAPR_TENSOR_HPP_
#define DAPR_TENSOR_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dapr {

// Dense row-major matrix of doubles. Vectors are 1 x n (rows) or n x 1
// (columns); scalars are 1 x 1.
using Tensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::vector<std::size_t> Shape(const Tensor& t) {
  return {static_cast<std::size_t>(t.rows()), static_cast<std::size_t>(t.cols())};
}

inline std::string ShapeString(const Tensor& t) {
  return "[" + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + "]";
}

inline std::span<const double> Values(const Tensor& t) {
  return {t.data(), static_cast<std::size_t>(t.size())};
}

inline Tensor RowVector(std::span<const double> values) {
  Tensor t(1, static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) t(0, static_cast<Eigen::Index>(i)) = values[i];
  return t;
}

inline Tensor ColumnVector(std::span<const double> values) {
  Tensor t(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) t(static_cast<Eigen::Index>(i), 0) = values[i];
  return t;
}

inline Tensor Scalar(double v) {
  Tensor t(1, 1);
  t(0, 0) = v;
  return t;
}

inline std::vector<double> ToVector(const Tensor& t) {
  return {t.data(), t.data() + t.size()};
}

// Copies the given rows of src into a new tensor, in order.
inline Tensor GatherRows(const Tensor& src, std::span<const std::size_t> rows) {
  Tensor out(static_cast<Eigen::Index>(rows.size()), src.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = src.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

}  // namespace dapr

#endif  // DAPR_TENSOR_HPP_
