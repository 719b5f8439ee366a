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


#ifndef BIOGATE_DATASET_H_
#define BIOGATE_DATASET_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace biogate {

enum class Split { kTrain, kValid, kTest };

const char* SplitName(Split split);
Split ParseSplit(const std::string& name);

struct ManifestEntry {
  std::string path;
  std::string label;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  // Sorted distinct labels; a label's index here is its class id.
  std::vector<std::string> Labels() const;
  int64_t LabelIndex(const std::string& label) const;
  std::vector<ManifestEntry> InSplit(Split split) const;

  // Throws kContract on repeated paths.
  void CheckUniquePaths() const;
  // Throws kContract unless every label has two or more training entries.
  void CheckTripletFeasible() const;
};

// "<path>\t<label>\t<train|valid|test>" per line. Relative paths are
// resolved against `base_dir` when it is non-empty.
DatasetManifest ReadManifest(std::istream& in, const std::string& base_dir = "");
DatasetManifest ReadManifestFile(const std::string& path);
void WriteManifest(std::ostream& out, const DatasetManifest& manifest);

}  // namespace biogate

#endif  // BIOGATE_DATASET_H_
