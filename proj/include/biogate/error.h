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

#ifndef BIOGATE_ERROR_H_
#define BIOGATE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace biogate {

// Every failure the engine can raise. The numeric values double as the CLI
// exit codes, so they must stay stable once released.
enum class ErrorCode : int {
  kUsage = 2,
  kFormat = 3,
  kUnsupported = 4,
  kTooShort = 5,
  kEmptyVoice = 6,
  kShape = 7,
  kContract = 8,
  kNumeric = 9,
  kSpec = 10,
  kConflict = 11,
  kUnmappedClass = 12,
  kIntegrity = 13,
  kVersion = 14,
  kSpecMismatch = 15,
  kFingerprint = 16,
  kIo = 17,
  kDegenerateVector = 18,
  kNotFound = 19,
  kDetector = 20,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

}  // namespace biogate

#endif  // BIOGATE_ERROR_H_
