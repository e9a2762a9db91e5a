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

#ifndef TSEKIT_MANIFEST_H_
#define TSEKIT_MANIFEST_H_

#include <map>
#include <string>
#include <vector>

#include "tsekit/common.h"

namespace tsekit {

// One line per utterance: utterance_id <TAB> speaker_id <TAB> path <TAB> duration.
struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  std::string path;
  double duration = 0.0;  // seconds
};

std::vector<UtteranceRecord> ReadUtteranceManifest(const std::string& path);
void WriteUtteranceManifest(const std::string& path,
                            const std::vector<UtteranceRecord>& records);

// One line per simulated mixture:
// mixture_id <TAB> target_speaker_id <TAB> mixture_path <TAB> target_path
//   <TAB> interference_path <TAB> noise_path (or "-")
struct MixtureRecord {
  std::string mixture_id;
  std::string target_speaker_id;
  std::string mixture_path;
  std::string target_path;
  std::string interference_path;
  std::string noise_path;  // empty when the mixture has no noise source

  bool has_noise() const { return !noise_path.empty(); }
};

std::vector<MixtureRecord> ReadMixtureManifest(const std::string& path);
void WriteMixtureManifest(const std::string& path, const std::vector<MixtureRecord>& records);

// Evaluation enrollment list: mixture_id <TAB> enrollment_utterance_id.
std::map<std::string, std::string> ReadEnrollmentMap(const std::string& path);
void WriteEnrollmentMap(const std::string& path,
                        const std::map<std::string, std::string>& entries);

}  // namespace tsekit

#endif  // TSEKIT_MANIFEST_H_
