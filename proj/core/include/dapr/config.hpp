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

// Schema-checked reading of JSON configuration documents. A ConfigReader
// records every problem (wrong type, out-of-range value, missing required
// key, unknown key) with its JSON path instead of stopping at the first one;
// ThrowIfErrors() then raises a single ConfigError listing them all.

#ifndef DAPR_CONFIG_HPP_
#define DAPR_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dapr/error.hpp"

namespace dapr {

class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// Reads a JSON file. Throws ConfigError (path "<file>") on I/O or syntax
// errors.
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

class ConfigReader {
 public:
  // Root reader over an object document.
  explicit ConfigReader(const nlohmann::json& node);

  const std::string& path() const { return path_; }
  bool valid() const { return node_ != nullptr; }
  bool Has(const std::string& key) const;

  // A nested object. Missing optional sections yield an invalid reader whose
  // getters return their fallbacks.
  ConfigReader Section(const std::string& key, bool required = false);
  void Require(const std::string& key);

  double Number(const std::string& key, double fallback,
                double min = -std::numeric_limits<double>::infinity(),
                bool exclusive_min = false);
  std::uint64_t Unsigned(const std::string& key, std::uint64_t fallback);
  std::size_t Size(const std::string& key, std::size_t fallback, std::size_t min = 0);
  bool Bool(const std::string& key, bool fallback);
  std::string String(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& choices = {});
  std::vector<double> NumberList(const std::string& key, const std::vector<double>& fallback,
                                 double min = -std::numeric_limits<double>::infinity(),
                                 bool exclusive_min = false);
  std::vector<std::size_t> SizeList(const std::string& key,
                                    const std::vector<std::size_t>& fallback,
                                    std::size_t min = 0);
  std::vector<std::uint64_t> UnsignedList(const std::string& key,
                                          const std::vector<std::uint64_t>& fallback);
  std::vector<std::string> StringList(const std::string& key,
                                      const std::vector<std::string>& fallback);
  // Array of objects; one reader per element.
  std::vector<ConfigReader> SectionList(const std::string& key, bool required = false);

  // Records an error at this reader's path (or path.key).
  void Fail(const std::string& key, const std::string& message);

  // Reports keys that no getter asked for. Call once every field was read.
  void RejectUnknownKeys();

  const std::vector<std::string>& errors() const { return *errors_; }
  void ThrowIfErrors() const;

 private:
  ConfigReader(const nlohmann::json* node, std::string path,
               std::shared_ptr<std::vector<std::string>> errors);
  std::string Join(const std::string& key) const;
  const nlohmann::json* Lookup(const std::string& key);

  const nlohmann::json* node_;
  std::string path_;
  std::shared_ptr<std::vector<std::string>> errors_;
  std::set<std::string> seen_;
};

}  // namespace dapr

#endif  // DAPR_CONFIG_HPP_
