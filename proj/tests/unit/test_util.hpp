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

#ifndef DAPR_TESTS_TEST_UTIL_HPP_
#define DAPR_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "dapr/tensor.hpp"

namespace dapr::testing {

inline Tensor RandomTensor(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                           double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Tensor t(rows, cols);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = normal(rng);
  return t;
}

// Central differences of a scalar function of one tensor.
inline Tensor FiniteDifference(const std::function<double(const Tensor&)>& f, Tensor at,
                               double h = 1e-6) {
  Tensor grad(at.rows(), at.cols());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double x = at.data()[i];
    at.data()[i] = x + h;
    const double up = f(at);
    at.data()[i] = x - h;
    const double down = f(at);
    at.data()[i] = x;
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// max |a - b| / max(1, max |b|).
inline double RelativeError(const Tensor& a, const Tensor& b) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

// Fresh directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("dapr_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace dapr::testing

#endif  // DAPR_TESTS_TEST_UTIL_HPP_
