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


#ifndef BIOGATE_SRC_MANIFEST_UTIL_H_
#define BIOGATE_SRC_MANIFEST_UTIL_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace biogate::internal {

// Line-oriented "key value..." text with a fixed first line.
class KeyValues {
 public:
  // Throws kSpecMismatch on a wrong header or a key without values.
  static KeyValues Parse(const std::string& text, const std::string& header);

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  const std::vector<std::string>& Strings(const std::string& key) const;
  std::vector<int64_t> Ints(const std::string& key) const;
  int64_t Int(const std::string& key) const;

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

std::string JoinInts(const std::vector<int64_t>& values);

}  // namespace biogate::internal

#endif  // BIOGATE_SRC_MANIFEST_UTIL_H_
