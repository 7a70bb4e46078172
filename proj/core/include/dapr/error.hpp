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

#ifndef DAPR_ERROR_HPP_
#define DAPR_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dapr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes that do not agree for the requested operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A computation produced NaN or infinity.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or configuration supplied by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t row, std::size_t column,
             const std::string& what)
      : Error(Format(file, row, column, what)),
        file_(std::move(file)),
        row_(row),
        column_(column) {}

  const std::string& file() const { return file_; }
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  static std::string Format(const std::string& file, std::size_t row,
                            std::size_t column, const std::string& what) {
    std::string out = file;
    if (row > 0) out += ":row " + std::to_string(row);
    if (column > 0) out += ":column " + std::to_string(column);
    return out + ": " + what;
  }

  std::string file_;
  std::size_t row_;
  std::size_t column_;
};

// Training produced a non-finite loss or penalty.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, std::size_t batch, std::string term,
                  const std::string& detail)
      : Error("training diverged at epoch " + std::to_string(epoch) +
              ", batch " + std::to_string(batch) + " (term: " + term +
              "): " + detail),
        epoch_(epoch),
        batch_(batch),
        term_(std::move(term)) {}

  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }
  const std::string& term() const { return term_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
  std::string term_;
};

}  // namespace dapr

#endif  // DAPR_ERROR_HPP_
