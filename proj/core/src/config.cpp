// Copyright 2026 The HyDeS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hydes/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hydes/errors.hpp"

namespace hydes {

namespace {

std::string trim(const std::string& s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

[[noreturn]] void parse_fail(const std::string& origin, int line,
                             const std::string& what) {
  raise(ErrorCode::kConfigParse,
        origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kConfigParse, path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']') parse_fail(origin, line_no, "unterminated section header");
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty()) parse_fail(origin, line_no, "empty section name");
      continue;
    }
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      parse_fail(origin, line_no, "expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) parse_fail(origin, line_no, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!cfg.values_.count(full)) cfg.order_.push_back(full);
    cfg.values_[full] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    raise(ErrorCode::kConfigParse, origin_ + ": missing required key '" + key + "'");
  }
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  return has(key) ? values_.at(key) : fallback;
}

int64_t Config::get_int(const std::string& key) const {
  const std::string& v = raw(key);
  char* end = nullptr;
  const long long parsed = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    raise(ErrorCode::kConfigParse, origin_ + ": key '" + key + "': '" + v + "' is not an integer");
  }
  return parsed;
}

int64_t Config::get_int(const std::string& key, int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

uint64_t Config::get_u64(const std::string& key) const {
  const std::string& v = raw(key);
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    raise(ErrorCode::kConfigParse, origin_ + ": key '" + key + "': '" + v + "' is not an unsigned integer");
  }
  return parsed;
}

uint64_t Config::get_u64(const std::string& key, uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

double Config::get_real(const std::string& key) const {
  const std::string& v = raw(key);
  char* end = nullptr;
  const double parsed = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    raise(ErrorCode::kConfigParse, origin_ + ": key '" + key + "': '" + v + "' is not a real number");
  }
  return parsed;
}

double Config::get_real(const std::string& key, double fallback) const {
  return has(key) ? get_real(key) : fallback;
}

bool Config::get_bool(const std::string& key) const {
  std::string v = raw(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  raise(ErrorCode::kConfigParse, origin_ + ": key '" + key + "': '" + v + "' is not a boolean");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
  const std::string& v = raw(key);
  std::vector<int> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    char* end = nullptr;
    const long parsed = std::strtol(t.c_str(), &end, 10);
    if (end == t.c_str() || *end != '\0') {
      raise(ErrorCode::kConfigParse, origin_ + ": key '" + key + "': '" + t + "' is not an integer");
    }
    out.push_back(static_cast<int>(parsed));
  }
  return out;
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::vector<int>& fallback) const {
  return has(key) ? get_int_list(key) : fallback;
}

std::vector<double> Config::get_real_list(const std::string& key) const {
  const std::string& v = raw(key);
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    char* end = nullptr;
    const double parsed = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0') {
      raise(ErrorCode::kConfigParse, origin_ + ": key '" + key + "': '" + t + "' is not a real number");
    }
    out.push_back(parsed);
  }
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = value;
}

std::vector<std::string> Config::keys() const { return order_; }

}  // namespace hydes
