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

#include "tsekit/evaluation.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "tsekit/objectives.h"

namespace tsekit {

void EvalResult::ComputeAggregates() {
  std::sort(records.begin(), records.end(),
            [](const EvalRecord& a, const EvalRecord& b) {
              return a.utterance_id < b.utterance_id;
            });
  mean_si_sdr = mean_si_sdr_mixture = mean_si_sdri = mean_sdr = 0.0;
  accuracy_percent = 0.0;
  if (records.empty()) return;
  int64_t correct = 0;
  for (const auto& r : records) {
    mean_si_sdr += r.si_sdr;
    mean_si_sdr_mixture += r.si_sdr_mixture;
    mean_si_sdri += r.si_sdri;
    mean_sdr += r.sdr;
    if (r.correct) ++correct;
  }
  const double n = static_cast<double>(records.size());
  mean_si_sdr /= n;
  mean_si_sdr_mixture /= n;
  mean_si_sdri /= n;
  mean_sdr /= n;
  accuracy_percent = 100.0 * static_cast<double>(correct) / n;
}

EvalResult Evaluate(const ExtractFn& extract, const std::vector<EvalItem>& items) {
  EvalResult result;
  for (const auto& item : items) {
    AudioSignal estimate = extract(item.mixture, item.enrollment);
    TK_REQUIRE(estimate.length() == item.target.length(),
               "estimate length mismatch on " + item.id);
    EvalRecord rec;
    rec.utterance_id = item.id;
    rec.si_sdr = std::min(60.0, -SiSdrLoss(item.target, estimate));
    rec.si_sdr_mixture = std::min(60.0, -SiSdrLoss(item.target, item.mixture));
    rec.si_sdri = rec.si_sdr - rec.si_sdr_mixture;
    rec.sdr = SdrMetricDb(item.target, estimate);
    rec.correct = rec.si_sdri > 1.0;
    result.records.push_back(std::move(rec));
  }
  result.ComputeAggregates();
  return result;
}

EvalResult Evaluate(const TseModel& model, const std::vector<EvalItem>& items) {
  return Evaluate(
      [&model](const AudioSignal& mixture, const AudioSignal& enrollment) {
        return model.Extract(mixture, enrollment);
      },
      items);
}

std::vector<EvalItem> LoadEvalItems(const std::vector<MixtureRecord>& mixtures,
                                    const std::map<std::string, std::string>& enrollment_map,
                                    const std::vector<UtteranceRecord>& utterances,
                                    int64_t* skipped) {
  std::map<std::string, const UtteranceRecord*> by_id;
  for (const auto& u : utterances) by_id[u.utterance_id] = &u;

  std::vector<EvalItem> items;
  int64_t skip_count = 0;
  for (const auto& m : mixtures) {
    auto it = enrollment_map.find(m.mixture_id);
    if (it == enrollment_map.end()) {
      std::cerr << "[warn] no enrollment listed for mixture " << m.mixture_id
                << ", skipping\n";
      ++skip_count;
      continue;
    }
    auto utt = by_id.find(it->second);
    if (utt == by_id.end()) {
      std::cerr << "[warn] enrollment utterance " << it->second << " for mixture "
                << m.mixture_id << " is not in the utterance manifest, skipping\n";
      ++skip_count;
      continue;
    }
    EvalItem item;
    item.id = m.mixture_id;
    item.mixture = ReadWav(m.mixture_path);
    item.target = ReadWav(m.target_path);
    item.enrollment = ReadWav(utt->second->path);
    items.push_back(std::move(item));
  }
  if (skipped != nullptr) *skipped = skip_count;
  return items;
}

EvalResult MixtureBaseline(const std::vector<EvalItem>& items) {
  return Evaluate(
      [](const AudioSignal& mixture, const AudioSignal&) { return mixture; }, items);
}

std::string RenderReportTable(const std::vector<std::pair<std::string, EvalResult>>& rows) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %10s %10s %10s %8s %6s\n", "system",
                "SI-SDR(dB)", "SI-SDRi", "SDR(dB)", "Acc(%)", "N");
  os << line;
  for (const auto& [label, result] : rows) {
    std::snprintf(line, sizeof(line), "%-24s %10.2f %10.2f %10.2f %8.2f %6zu\n",
                  label.c_str(), result.mean_si_sdr, result.mean_si_sdri, result.mean_sdr,
                  result.accuracy_percent, result.records.size());
    os << line;
  }
  return os.str();
}

std::string RenderRecordsTsv(const EvalResult& result) {
  std::ostringstream os;
  os << "utterance_id\tsi_sdr\tsi_sdr_mixture\tsi_sdri\tsdr\tcorrect\n";
  for (const auto& r : result.records) {
    os << r.utterance_id << '\t' << r.si_sdr << '\t' << r.si_sdr_mixture << '\t' << r.si_sdri
       << '\t' << r.sdr << '\t' << (r.correct ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace tsekit
