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

#ifndef TSEKIT_CLI_H_
#define TSEKIT_CLI_H_

#include <string>
#include <vector>

#include "tsekit/augment.h"
#include "tsekit/config.h"
#include "tsekit/extractor.h"
#include "tsekit/training.h"

namespace tsekit {

// Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.
int RunCli(int argc, const char* const* argv);

// Config-to-struct wiring, shared by the CLI and tests. Unknown keys are
// rejected so typos fail loudly.
TseModelConfig ModelConfigFromKv(const KeyValueConfig& kv, int num_speakers);
TrainConfig TrainConfigFromKv(const KeyValueConfig& kv);
AugmentConfig AugmentConfigFromKv(const KeyValueConfig& kv);
void CheckKnownKeys(const KeyValueConfig& kv);

// Written into <out_dir>/run_manifest.json before a subcommand does any work.
struct RunManifest {
  std::string command;
  std::string config_path;
  uint64_t seed = 0;
  std::string artifact_hash;
  std::string output_dir;
  std::vector<std::string> argv;
};

void WriteRunManifest(const RunManifest& manifest);

}  // namespace tsekit

#endif  // TSEKIT_CLI_H_
