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

#include "dapr/config.hpp"

#include <cmath>
#include <fstream>

#include "dapr/csv.hpp"

namespace dapr {
namespace {

// Integers built in code are signed even when non-negative.
bool NonNegativeInteger(const nlohmann::json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::string JoinLines(const std::vector<std::string>& errors) {
  std::string out = "invalid configuration (" + std::to_string(errors.size()) + " error" +
                    (errors.size() == 1 ? "" : "s") + ")";
  for (const std::string& e : errors) out += "\n  " + e;
  return out;
}

std::string Bound(double min, bool exclusive) {
  return (exclusive ? "> " : ">= ") + FormatDouble(min);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : InvalidArgument(JoinLines(errors)), errors_(std::move(errors)) {}

nlohmann::json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open file"});
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
}

ConfigReader::ConfigReader(const nlohmann::json& node)
    : ConfigReader(&node, "", std::make_shared<std::vector<std::string>>()) {
  if (!node.is_object()) {
    Fail("", "expected an object");
    node_ = nullptr;
  }
}

ConfigReader::ConfigReader(const nlohmann::json* node, std::string path,
                           std::shared_ptr<std::vector<std::string>> errors)
    : node_(node), path_(std::move(path)), errors_(std::move(errors)) {}

std::string ConfigReader::Join(const std::string& key) const {
  if (key.empty()) return path_.empty() ? "<root>" : path_;
  if (path_.empty()) return key;
  return path_ + "." + key;
}

bool ConfigReader::Has(const std::string& key) const {
  return node_ != nullptr && node_->contains(key);
}

const nlohmann::json* ConfigReader::Lookup(const std::string& key) {
  seen_.insert(key);
  if (node_ == nullptr) return nullptr;
  auto it = node_->find(key);
  return it == node_->end() ? nullptr : &*it;
}

void ConfigReader::Fail(const std::string& key, const std::string& message) {
  errors_->push_back(Join(key) + ": " + message);
}

void ConfigReader::Require(const std::string& key) {
  if (node_ != nullptr && !Has(key)) Fail(key, "required key is missing");
}

ConfigReader ConfigReader::Section(const std::string& key, bool required) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) {
    if (required && node_ != nullptr) Fail(key, "required section is missing");
    return ConfigReader(nullptr, Join(key), errors_);
  }
  if (!v->is_object()) {
    Fail(key, "expected an object");
    return ConfigReader(nullptr, Join(key), errors_);
  }
  return ConfigReader(v, Join(key), errors_);
}

double ConfigReader::Number(const std::string& key, double fallback, double min,
                            bool exclusive_min) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) {
    Fail(key, "expected a number");
    return fallback;
  }
  const double x = v->get<double>();
  if (!std::isfinite(x) || x < min || (exclusive_min && x == min)) {
    Fail(key, "must be finite and " + Bound(min, exclusive_min));
    return fallback;
  }
  return x;
}

std::uint64_t ConfigReader::Unsigned(const std::string& key, std::uint64_t fallback) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) return fallback;
  if (!NonNegativeInteger(*v)) {
    Fail(key, "expected a non-negative integer");
    return fallback;
  }
  return v->get<std::uint64_t>();
}

std::size_t ConfigReader::Size(const std::string& key, std::size_t fallback, std::size_t min) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) return fallback;
  if (!NonNegativeInteger(*v) || v->get<std::uint64_t>() < min) {
    Fail(key, "expected an integer >= " + std::to_string(min));
    return fallback;
  }
  return static_cast<std::size_t>(v->get<std::uint64_t>());
}

bool ConfigReader::Bool(const std::string& key, bool fallback) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) {
    Fail(key, "expected true or false");
    return fallback;
  }
  return v->get<bool>();
}

std::string ConfigReader::String(const std::string& key, const std::string& fallback,
                                 const std::vector<std::string>& choices) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) {
    Fail(key, "expected a string");
    return fallback;
  }
  std::string s = v->get<std::string>();
  if (!choices.empty()) {
    bool found = false;
    std::string list;
    for (const std::string& c : choices) {
      found = found || c == s;
      list += (list.empty() ? "" : ", ") + c;
    }
    if (!found) {
      Fail(key, "'" + s + "' is not one of: " + list);
      return fallback;
    }
  }
  return s;
}

std::vector<double> ConfigReader::NumberList(const std::string& key,
                                             const std::vector<double>& fallback, double min,
                                             bool exclusive_min) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_array() || v->empty()) {
    Fail(key, "expected a non-empty array of numbers");
    return fallback;
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const auto& e = (*v)[i];
    const std::string at = key + "[" + std::to_string(i) + "]";
    if (!e.is_number()) {
      Fail(at, "expected a number");
      continue;
    }
    const double x = e.get<double>();
    if (!std::isfinite(x) || x < min || (exclusive_min && x == min)) {
      Fail(at, "must be finite and " + Bound(min, exclusive_min));
      continue;
    }
    out.push_back(x);
  }
  return out.size() == v->size() ? out : fallback;
}

std::vector<std::size_t> ConfigReader::SizeList(const std::string& key,
                                                const std::vector<std::size_t>& fallback,
                                                std::size_t min) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_array()) {
    Fail(key, "expected an array of integers");
    return fallback;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const auto& e = (*v)[i];
    if (!NonNegativeInteger(e) || e.get<std::uint64_t>() < min) {
      Fail(key + "[" + std::to_string(i) + "]", "expected an integer >= " + std::to_string(min));
      continue;
    }
    out.push_back(static_cast<std::size_t>(e.get<std::uint64_t>()));
  }
  return out.size() == v->size() ? out : fallback;
}

std::vector<std::uint64_t> ConfigReader::UnsignedList(const std::string& key,
                                                      const std::vector<std::uint64_t>& fallback) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_array() || v->empty()) {
    Fail(key, "expected a non-empty array of non-negative integers");
    return fallback;
  }
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const auto& e = (*v)[i];
    if (!NonNegativeInteger(e)) {
      Fail(key + "[" + std::to_string(i) + "]", "expected a non-negative integer");
      continue;
    }
    out.push_back(e.get<std::uint64_t>());
  }
  return out.size() == v->size() ? out : fallback;
}

std::vector<std::string> ConfigReader::StringList(const std::string& key,
                                                  const std::vector<std::string>& fallback) {
  const nlohmann::json* v = Lookup(key);
  if (v == nullptr) return fallback;
  if (!v->is_array()) {
    Fail(key, "expected an array of strings");
    return fallback;
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_string()) {
      Fail(key + "[" + std::to_string(i) + "]", "expected a string");
      continue;
    }
    out.push_back((*v)[i].get<std::string>());
  }
  return out.size() == v->size() ? out : fallback;
}

std::vector<ConfigReader> ConfigReader::SectionList(const std::string& key, bool required) {
  const nlohmann::json* v = Lookup(key);
  std::vector<ConfigReader> out;
  if (v == nullptr) {
    if (required && node_ != nullptr) Fail(key, "required key is missing");
    return out;
  }
  if (!v->is_array() || v->empty()) {
    Fail(key, "expected a non-empty array of objects");
    return out;
  }
  for (std::size_t i = 0; i < v->size(); ++i) {
    const std::string at = Join(key) + "[" + std::to_string(i) + "]";
    if (!(*v)[i].is_object()) {
      errors_->push_back(at + ": expected an object");
      continue;
    }
    out.push_back(ConfigReader(&(*v)[i], at, errors_));
  }
  return out;
}

void ConfigReader::RejectUnknownKeys() {
  if (node_ == nullptr) return;
  for (const auto& [key, value] : node_->items()) {
    if (!seen_.count(key)) Fail(key, "unknown key");
  }
}

void ConfigReader::ThrowIfErrors() const {
  if (!errors_->empty()) throw ConfigError(*errors_);
}

}  // namespace dapr
