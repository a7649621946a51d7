// include/speechchain/train/checkpoint.h

// Copyright 2026  speechchain authors
//
// See COPYING at the top of the source tree for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SPEECHCHAIN_TRAIN_CHECKPOINT_H_
#define SPEECHCHAIN_TRAIN_CHECKPOINT_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "speechchain/ad/param.h"

namespace speechchain::train {

inline constexpr uint32_t kCheckpointVersion = 1;

// Everything needed to resume or evaluate a run. Tensors are stored as
// 64-bit values, so save followed by load is exact.
struct Checkpoint {
  int epoch = 0;
  std::string config_hash;
  nlohmann::json metadata = nlohmann::json::object();
  std::map<std::string, Matrix> params;
  std::set<std::string> frozen;  // parameter names
  std::map<std::string, Matrix> optimizer;

  // Adds every parameter of `set` with its freeze flag.
  void Capture(const ParamSet& set);
  // Copies values and freeze flags for the parameters of `set` found here.
  // MissingArtifactError if a parameter of `set` is absent.
  void Apply(ParamSet& set) const;
  // Partition name -> all parameters frozen.
  std::map<std::string, bool> PartitionFrozen() const;

  bool operator==(const Checkpoint& other) const;
};

// File layout: "SCCK", uint32 version, uint64 header length, JSON header,
// then each tensor listed in the header as row-major float64.
void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// MissingArtifactError when the file is absent, FormatError when it is
// truncated, corrupt or of another version. A config hash that differs from
// a non-empty `expected_hash` appends a message to `warnings`.
Checkpoint LoadCheckpoint(const std::filesystem::path& path, const std::string& expected_hash = "",
                          std::vector<std::string>* warnings = nullptr);

}  // namespace speechchain::train

#endif  // SPEECHCHAIN_TRAIN_CHECKPOINT_H_
