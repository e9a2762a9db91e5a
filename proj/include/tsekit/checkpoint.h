// Copyright (c) 2026 tsekit Authors
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

#ifndef TSEKIT_CHECKPOINT_H_
#define TSEKIT_CHECKPOINT_H_

#include <map>
#include <string>
#include <vector>

#include "tsekit/tensor.h"

namespace tsekit {

// Named-parameter snapshot plus the metadata needed to resume or audit a run.
struct Checkpoint {
  std::map<std::string, nn::Tensor> parameters;
  int64_t epoch = 0;
  std::string config_hash;
  std::string config_text;               // canonical key=value dump of the run config
  std::vector<std::string> speaker_ids;  // label order used by the classifier
};

// Self-describing binary container: magic, JSON metadata block, then
// length-prefixed named float64 tensors.
void SaveCheckpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::string& path);

// Elementwise arithmetic mean by parameter name. All inputs must carry an
// identical name/shape set; k = 1 returns the input unchanged.
Checkpoint AverageCheckpoints(const std::vector<Checkpoint>& checkpoints);

// Content hash of a file on disk (determinism harness).
uint64_t HashFile(const std::string& path);

}  // namespace tsekit

#endif  // TSEKIT_CHECKPOINT_H_
