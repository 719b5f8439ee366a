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


#include "biogate/dataset.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "biogate/error.h"

namespace biogate {

const char* SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid") return Split::kValid;
  if (name == "test") return Split::kTest;
  Fail(ErrorCode::kFormat, "unknown split '" + name + "'");
}

std::vector<std::string> DatasetManifest::Labels() const {
  std::set<std::string> labels;
  for (const auto& e : entries) labels.insert(e.label);
  return {labels.begin(), labels.end()};
}

int64_t DatasetManifest::LabelIndex(const std::string& label) const {
  const auto labels = Labels();
  auto it = std::lower_bound(labels.begin(), labels.end(), label);
  Require(it != labels.end() && *it == label, ErrorCode::kNotFound,
          "label '" + label + "' is not in the manifest");
  return it - labels.begin();
}

std::vector<ManifestEntry> DatasetManifest::InSplit(Split split) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (e.split == split) out.push_back(e);
  }
  return out;
}

void DatasetManifest::CheckUniquePaths() const {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    Require(seen.insert(e.path).second, ErrorCode::kContract,
            "manifest lists '" + e.path + "' more than once");
  }
}

void DatasetManifest::CheckTripletFeasible() const {
  std::map<std::string, int> train_counts;
  for (const auto& label : Labels()) train_counts[label] = 0;
  for (const auto& e : entries) {
    if (e.split == Split::kTrain) ++train_counts[e.label];
  }
  for (const auto& [label, count] : train_counts) {
    Require(count >= 2, ErrorCode::kContract,
            "label '" + label + "' has " + std::to_string(count) +
                " training entries; triplet training needs at least 2");
  }
}

DatasetManifest ReadManifest(std::istream& in, const std::string& base_dir) {
  DatasetManifest manifest;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::istringstream split(line);
    std::string field;
    while (std::getline(split, field, '\t')) fields.push_back(field);
    Require(fields.size() == 3 && !fields[0].empty() && !fields[1].empty(),
            ErrorCode::kFormat,
            "manifest line " + std::to_string(line_no) + " needs path, label and split");
    std::filesystem::path path(fields[0]);
    if (!base_dir.empty() && path.is_relative()) path = std::filesystem::path(base_dir) / path;
    manifest.entries.push_back({path.string(), fields[1], ParseSplit(fields[2])});
  }
  manifest.CheckUniquePaths();
  return manifest;
}

DatasetManifest ReadManifestFile(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open manifest " + path);
  return ReadManifest(in, std::filesystem::path(path).parent_path().string());
}

void WriteManifest(std::ostream& out, const DatasetManifest& manifest) {
  for (const auto& e : manifest.entries) {
    out << e.path << '\t' << e.label << '\t' << SplitName(e.split) << '\n';
  }
}

}  // namespace biogate
