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

#ifndef DAPR_CSV_HPP_
#define DAPR_CSV_HPP_

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace dapr {

// 17 significant digits: parses back to the identical double.
std::string FormatDouble(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a comma-separated file with a header row. Throws ParseError for a
// missing file, an empty file, or a row whose length differs from the header.
CsvTable ReadCsv(const std::filesystem::path& path);

// Parses a finite double. Throws ParseError naming file, row, and column.
double ParseCell(std::string_view cell, const std::string& file, std::size_t row,
                 std::size_t column);

void WriteCsvRow(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace dapr

#endif  // DAPR_CSV_HPP_
