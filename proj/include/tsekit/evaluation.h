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

#ifndef TSEKIT_EVALUATION_H_
#define TSEKIT_EVALUATION_H_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tsekit/extractor.h"
#include "tsekit/manifest.h"

namespace tsekit {

struct EvalRecord {
  std::string utterance_id;
  double si_sdr = 0.0;          // estimate vs target, capped at +60 dB
  double si_sdr_mixture = 0.0;  // unprocessed mixture vs target
  double si_sdri = 0.0;         // si_sdr - si_sdr_mixture
  double sdr = 0.0;
  bool correct = false;  // si_sdri > 1 dB
};

struct EvalResult {
  std::vector<EvalRecord> records;  // ordered by utterance_id
  int64_t skipped = 0;              // missing enrollment etc.
  double mean_si_sdr = 0.0;
  double mean_si_sdr_mixture = 0.0;
  double mean_si_sdri = 0.0;
  double mean_sdr = 0.0;
  double accuracy_percent = 0.0;

  void ComputeAggregates();
};

struct EvalItem {
  std::string id;
  AudioSignal mixture;
  AudioSignal target;
  AudioSignal enrollment;
};

// Extraction function so oracle/identity models can be scored in tests:
// (mixture, enrollment) -> estimate.
using ExtractFn = std::function<AudioSignal(const AudioSignal&, const AudioSignal&)>;

EvalResult Evaluate(const ExtractFn& extract, const std::vector<EvalItem>& items);
EvalResult Evaluate(const TseModel& model, const std::vector<EvalItem>& items);

// Loads mixtures from a manifest, resolving enrollment through the
// mixture_id -> utterance_id map. Items without an enrollment are skipped
// with a warning and excluded from aggregates.
std::vector<EvalItem> LoadEvalItems(const std::vector<MixtureRecord>& mixtures,
                                    const std::map<std::string, std::string>& enrollment_map,
                                    const std::vector<UtteranceRecord>& utterances,
                                    int64_t* skipped);

// Scores the unprocessed mixture against the target (Table-style baseline row).
EvalResult MixtureBaseline(const std::vector<EvalItem>& items);

// Aligned text table, one row per labeled result.
std::string RenderReportTable(const std::vector<std::pair<std::string, EvalResult>>& rows);
// Machine-readable per-record lines.
std::string RenderRecordsTsv(const EvalResult& result);

}  // namespace tsekit

#endif  // TSEKIT_EVALUATION_H_
