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

#include "tsekit/manifest.h"

#include <fstream>
#include <set>
#include <sstream>

namespace tsekit {

namespace {

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFailure("cannot open manifest: " + path);
  return in;
}

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write manifest: " + path);
  return out;
}

}  // namespace

std::vector<UtteranceRecord> ReadUtteranceManifest(const std::string& path) {
  auto in = OpenForRead(path);
  std::vector<UtteranceRecord> records;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = SplitFields(line);
    if (f.size() != 4) {
      throw RuntimeFailure("manifest " + path + " line " + std::to_string(line_no) +
                           ": expected 4 tab-separated fields");
    }
    UtteranceRecord r{f[0], f[1], f[2], std::stod(f[3])};
    TK_REQUIRE(r.duration > 0.0, "utterance duration must be positive: " + r.utterance_id);
    TK_REQUIRE(ids.insert(r.utterance_id).second,
               "duplicate utterance_id in manifest: " + r.utterance_id);
    records.push_back(std::move(r));
  }
  return records;
}

void WriteUtteranceManifest(const std::string& path,
                            const std::vector<UtteranceRecord>& records) {
  auto out = OpenForWrite(path);
  for (const auto& r : records) {
    out << r.utterance_id << '\t' << r.speaker_id << '\t' << r.path << '\t' << r.duration
        << '\n';
  }
}

std::vector<MixtureRecord> ReadMixtureManifest(const std::string& path) {
  auto in = OpenForRead(path);
  std::vector<MixtureRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = SplitFields(line);
    if (f.size() != 6) {
      throw RuntimeFailure("mixture manifest " + path + " line " + std::to_string(line_no) +
                           ": expected 6 tab-separated fields");
    }
    MixtureRecord r{f[0], f[1], f[2], f[3], f[4], f[5] == "-" ? "" : f[5]};
    records.push_back(std::move(r));
  }
  return records;
}

void WriteMixtureManifest(const std::string& path, const std::vector<MixtureRecord>& records) {
  auto out = OpenForWrite(path);
  for (const auto& r : records) {
    out << r.mixture_id << '\t' << r.target_speaker_id << '\t' << r.mixture_path << '\t'
        << r.target_path << '\t' << r.interference_path << '\t'
        << (r.noise_path.empty() ? "-" : r.noise_path) << '\n';
  }
}

std::map<std::string, std::string> ReadEnrollmentMap(const std::string& path) {
  auto in = OpenForRead(path);
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = SplitFields(line);
    if (f.size() != 2) {
      throw RuntimeFailure("enrollment map " + path + " line " + std::to_string(line_no) +
                           ": expected 2 tab-separated fields");
    }
    out[f[0]] = f[1];
  }
  return out;
}

void WriteEnrollmentMap(const std::string& path,
                        const std::map<std::string, std::string>& entries) {
  auto out = OpenForWrite(path);
  for (const auto& [k, v] : entries) out << k << '\t' << v << '\n';
}

}  // namespace tsekit
