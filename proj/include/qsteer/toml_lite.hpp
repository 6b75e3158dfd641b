// Copyright 2026 The Qsteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace qsteer {

/// Small TOML subset: [section] headers, key = value lines, # comments.
/// Values: strings, booleans, integers, floats, and flat arrays of numbers
/// or strings. Keys are addressed as "section.key".
class TomlLite {
  public:
    using Value = std::variant<bool, std::int64_t, double, std::string,
                               std::vector<double>, std::vector<std::string>>;

    static TomlLite parse(const std::string& text);
    static TomlLite parse_file(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    bool boolean(const std::string& key, bool fallback) const;
    std::int64_t integer(const std::string& key, std::int64_t fallback) const;
    double number(const std::string& key, double fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

  private:
    std::map<std::string, Value> values_;
};

}  // namespace qsteer
