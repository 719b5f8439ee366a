// Copyright (c) 2026 The biogate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "manifest_util.h"

#include <charconv>
#include <sstream>

#include "biogate/error.h"

namespace biogate::internal {

KeyValues KeyValues::Parse(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  Require(std::getline(in, line) && line == header, ErrorCode::kSpecMismatch,
          "manifest does not start with '" + header + "'");
  KeyValues kv;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string key, value;
    fields >> key;
    std::vector<std::string> values;
    while (fields >> value) values.push_back(value);
    Require(!values.empty(), ErrorCode::kSpecMismatch,
            "manifest line has no values: " + line);
    Require(kv.values_.emplace(key, std::move(values)).second,
            ErrorCode::kSpecMismatch, "manifest repeats key '" + key + "'");
  }
  return kv;
}

const std::vector<std::string>& KeyValues::Strings(const std::string& key) const {
  auto it = values_.find(key);
  Require(it != values_.end(), ErrorCode::kSpecMismatch,
          "manifest is missing '" + key + "'");
  return it->second;
}

std::vector<int64_t> KeyValues::Ints(const std::string& key) const {
  std::vector<int64_t> out;
  for (const std::string& s : Strings(key)) {
    int64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    Require(ec == std::errc() && end == s.data() + s.size(), ErrorCode::kSpecMismatch,
            "manifest value '" + s + "' for '" + key + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

int64_t KeyValues::Int(const std::string& key) const {
  auto v = Ints(key);
  Require(v.size() == 1, ErrorCode::kSpecMismatch,
          "manifest key '" + key + "' must have one value");
  return v.front();
}

std::string JoinInts(const std::vector<int64_t>& values) {
  std::string s;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(values[i]);
  }
  return s;
}

}  // namespace biogate::internal
