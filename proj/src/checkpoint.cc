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

#include "tsekit/checkpoint.h"

#include <cstring>
#include <fstream>

#include "json.hpp"

namespace tsekit {

namespace {
constexpr char kMagic[8] = {'T', 'S', 'K', 'T', '0', '0', '0', '1'};

template <typename T>
void WriteRaw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadRaw(std::ifstream& in, const std::string& path) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw RuntimeFailure("truncated checkpoint: " + path);
  return v;
}
}  // namespace

void SaveCheckpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));

  nlohmann::json meta;
  meta["epoch"] = checkpoint.epoch;
  meta["config_hash"] = checkpoint.config_hash;
  meta["config_text"] = checkpoint.config_text;
  meta["speaker_ids"] = checkpoint.speaker_ids;
  meta["tensor_count"] = checkpoint.parameters.size();
  meta["dtype"] = "f64";
  const std::string meta_str = meta.dump();
  WriteRaw(out, static_cast<uint64_t>(meta_str.size()));
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));

  for (const auto& [name, tensor] : checkpoint.parameters) {
    WriteRaw(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    WriteRaw(out, static_cast<uint32_t>(tensor.ndim()));
    for (int i = 0; i < tensor.ndim(); ++i) WriteRaw(out, static_cast<int64_t>(tensor.dim(i)));
    out.write(reinterpret_cast<const char*>(tensor.data()),
              static_cast<std::streamsize>(tensor.numel() * sizeof(double)));
  }
  if (!out) throw RuntimeFailure("short write on checkpoint: " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw RuntimeFailure("not a tsekit checkpoint: " + path);
  }
  const auto meta_len = ReadRaw<uint64_t>(in, path);
  std::string meta_str(meta_len, '\0');
  in.read(meta_str.data(), static_cast<std::streamsize>(meta_len));
  if (!in) throw RuntimeFailure("truncated checkpoint metadata: " + path);
  nlohmann::json meta = nlohmann::json::parse(meta_str);

  Checkpoint ck;
  ck.epoch = meta.value("epoch", 0);
  ck.config_hash = meta.value("config_hash", "");
  ck.config_text = meta.value("config_text", "");
  if (meta.contains("speaker_ids")) {
    ck.speaker_ids = meta["speaker_ids"].get<std::vector<std::string>>();
  }
  const size_t tensor_count = meta.value("tensor_count", size_t{0});
  for (size_t i = 0; i < tensor_count; ++i) {
    const auto name_len = ReadRaw<uint32_t>(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto ndim = ReadRaw<uint32_t>(in, path);
    std::vector<int64_t> dims(ndim);
    for (auto& d : dims) d = ReadRaw<int64_t>(in, path);
    nn::Tensor t(dims);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.numel() * sizeof(double)));
    if (!in) throw RuntimeFailure("truncated checkpoint tensor: " + path);
    ck.parameters.emplace(std::move(name), std::move(t));
  }
  return ck;
}

Checkpoint AverageCheckpoints(const std::vector<Checkpoint>& checkpoints) {
  TK_REQUIRE(!checkpoints.empty(), "need at least one checkpoint to average");
  Checkpoint out = checkpoints.front();
  const double inv_k = 1.0 / static_cast<double>(checkpoints.size());
  for (auto& [name, tensor] : out.parameters) {
    for (size_t i = 1; i < checkpoints.size(); ++i) {
      auto it = checkpoints[i].parameters.find(name);
      TK_REQUIRE(it != checkpoints[i].parameters.end(),
                 "checkpoint missing parameter: " + name);
      TK_REQUIRE(it->second.same_shape(tensor), "checkpoint shape mismatch for: " + name);
      for (int64_t j = 0; j < tensor.numel(); ++j) tensor[j] += it->second[j];
    }
    for (int64_t j = 0; j < tensor.numel(); ++j) tensor[j] *= inv_k;
  }
  for (size_t i = 1; i < checkpoints.size(); ++i) {
    TK_REQUIRE(checkpoints[i].parameters.size() == out.parameters.size(),
               "checkpoints carry different parameter sets");
  }
  out.epoch = checkpoints.back().epoch;
  return out;
}

uint64_t HashFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot open file for hashing: " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return Fnv1a64(bytes.data(), bytes.size());
}

}  // namespace tsekit
