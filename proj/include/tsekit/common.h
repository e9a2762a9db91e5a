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

#ifndef TSEKIT_COMMON_H_
#define TSEKIT_COMMON_H_

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tsekit {

// Thrown when a caller violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown when a computation cannot proceed (I/O failure, corrupt file, ...).
class RuntimeFailure : public std::runtime_error {
 public:
  explicit RuntimeFailure(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
inline void RequireFailed(const char* expr, const std::string& msg) {
  std::ostringstream os;
  os << msg << " (violated: " << expr << ")";
  throw InvalidInput(os.str());
}
}  // namespace detail

// Precondition check on public API surfaces.
#define TK_REQUIRE(cond, msg)                        \
  do {                                               \
    if (!(cond)) tsekit::detail::RequireFailed(#cond, (msg)); \
  } while (0)

// FNV-1a, used for config hashes and checkpoint identity in run manifests.
inline uint64_t Fnv1a64(const void* data, size_t n, uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t Fnv1a64(const std::string& s) { return Fnv1a64(s.data(), s.size()); }

inline std::string HexHash(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

constexpr int kSampleRate = 16000;  // pipeline-wide rate, enforced at ingestion

}  // namespace tsekit

#endif  // TSEKIT_COMMON_H_
