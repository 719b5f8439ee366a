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

#include "biogate/error.h"

namespace biogate {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kTooShort: return "too-short";
    case ErrorCode::kEmptyVoice: return "empty-voice";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kContract: return "contract";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kSpec: return "spec";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kUnmappedClass: return "unmapped-class";
    case ErrorCode::kIntegrity: return "integrity";
    case ErrorCode::kVersion: return "version";
    case ErrorCode::kSpecMismatch: return "spec-mismatch";
    case ErrorCode::kFingerprint: return "fingerprint";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kDegenerateVector: return "degenerate-vector";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kDetector: return "detector";
  }
  return "unknown";
}

}  // namespace biogate
