// Copyright 2026 The DRDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace drdp {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of stream `stream_id` under `master`:
///   splitmix64(splitmix64(master) ^ splitmix64(~stream_id)).
/// Meters use their meter id as stream id; fixed ids below are reserved.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t stream_id) {
  return splitmix64(splitmix64(master) ^ splitmix64(~stream_id));
}

inline constexpr std::uint64_t kUtilityStream = 0xFFFF'FFFF'FFFF'FFFFULL;
inline constexpr std::uint64_t kSynthesisStream = 0xFFFF'FFFF'FFFF'FFFEULL;
inline constexpr std::uint64_t kSweepStreamBase = 0x5EED'0000'0000'0000ULL;

/// Seeded 64-bit random stream. The output sequence of std::mt19937_64 is
/// fixed by the standard, and uniforms are built from raw bits here, so a
/// stream reproduces bit-identically across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream for_stream(std::uint64_t master,
                                 std::uint64_t stream_id) {
    return RandomStream(derive_seed(master, stream_id));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform_open() {
    constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kInv53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace drdp
