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

#include "qsteer/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "qsteer/errors.hpp"

namespace qsteer {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Removes a trailing comment, respecting double-quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool looks_like_integer(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

TomlLite::Value parse_scalar(const std::string& raw, int line_no) {
    const std::string s = strip(raw);
    if (s.empty()) throw ValidationError("toml: empty value at line " + std::to_string(line_no));
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ValidationError("toml: unterminated string at line " + std::to_string(line_no));
        return s.substr(1, s.size() - 2);
    }
    if (s == "true") return true;
    if (s == "false") return false;
    if (looks_like_integer(s)) return static_cast<std::int64_t>(std::stoll(s));
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (...) {
    }
    throw ValidationError("toml: cannot parse value '" + s + "' at line " +
                          std::to_string(line_no));
}

TomlLite::Value parse_array(const std::string& raw, int line_no) {
    std::vector<TomlLite::Value> items;
    std::string body = strip(raw);
    body = body.substr(1, body.size() - 2);  // drop [ ]
    std::string current;
    bool in_string = false;
    for (char c : body) {
        if (c == '"') in_string = !in_string;
        if (c == ',' && !in_string) {
            if (!strip(current).empty()) items.push_back(parse_scalar(current, line_no));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!strip(current).empty()) items.push_back(parse_scalar(current, line_no));

    if (!items.empty() && std::holds_alternative<std::string>(items.front())) {
        std::vector<std::string> out;
        for (auto& v : items) out.push_back(std::get<std::string>(v));
        return out;
    }
    std::vector<double> out;
    for (auto& v : items) {
        if (std::holds_alternative<double>(v))
            out.push_back(std::get<double>(v));
        else if (std::holds_alternative<std::int64_t>(v))
            out.push_back(static_cast<double>(std::get<std::int64_t>(v)));
        else
            throw ValidationError("toml: mixed array types at line " + std::to_string(line_no));
    }
    return out;
}

}  // namespace

TomlLite TomlLite::parse(const std::string& text) {
    TomlLite out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("toml: bad section header at line " +
                                      std::to_string(line_no));
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("toml: expected key = value at line " +
                                  std::to_string(line_no));
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("toml: empty key at line " + std::to_string(line_no));
        std::string full = section.empty() ? key : section + "." + key;
        if (!value.empty() && value.front() == '[')
            out.values_[full] = parse_array(value, line_no);
        else
            out.values_[full] = parse_scalar(value, line_no);
    }
    return out;
}

TomlLite TomlLite::parse_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("toml: cannot open " + path.string());
    std::stringstream buffer;
    buffer << f.rdbuf();
    return parse(buffer.str());
}

bool TomlLite::boolean(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* v = std::get_if<bool>(&it->second)) return *v;
    throw ValidationError("toml: key '" + key + "' is not a boolean");
}

std::int64_t TomlLite::integer(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
    throw ValidationError("toml: key '" + key + "' is not an integer");
}

double TomlLite::number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* v = std::get_if<double>(&it->second)) return *v;
    if (auto* v = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*v);
    throw ValidationError("toml: key '" + key + "' is not a number");
}

std::string TomlLite::text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* v = std::get_if<std::string>(&it->second)) return *v;
    throw ValidationError("toml: key '" + key + "' is not a string");
}

std::vector<double> TomlLite::numbers(const std::string& key,
                                      std::vector<double> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
    if (auto* v = std::get_if<double>(&it->second)) return {*v};
    if (auto* v = std::get_if<std::int64_t>(&it->second))
        return {static_cast<double>(*v)};
    throw ValidationError("toml: key '" + key + "' is not a number array");
}

}  // namespace qsteer
