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


#ifndef BIOGATE_TOOLS_CLI_H_
#define BIOGATE_TOOLS_CLI_H_

#include <ostream>

namespace biogate::cli {

// Runs one `biogate` command. Returns the process exit status: 0 on success,
// the ErrorCode value on an engine error, 2 on a usage error and 1 on any
// other failure.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Runs one `biogate-synth` command (synthetic corpora).
int RunSynth(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace biogate::cli

#endif  // BIOGATE_TOOLS_CLI_H_
