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

#ifndef TSEKIT_CONFIG_H_
#define TSEKIT_CONFIG_H_

#include <map>
#include <string>
#include <vector>

#include "tsekit/common.h"

namespace tsekit {

// Flat "key = value" configuration. '#' starts a comment; later assignments
// win, so command-line overrides are plain Set calls.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig FromFile(const std::string& path);
  static KeyValueConfig FromString(const std::string& text);

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  int64_t GetInt(const std::string& key, int64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  std::vector<std::string> GetList(const std::string& key) const;  // comma-separated

  void Set(const std::string& key, const std::string& value) { values_[key] = value; }

  // Sorted "key = value" lines; the config hash is taken over this text.
  std::string CanonicalText() const;
  std::string Hash() const { return HexHash(Fnv1a64(CanonicalText())); }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace tsekit

#endif  // TSEKIT_CONFIG_H_
