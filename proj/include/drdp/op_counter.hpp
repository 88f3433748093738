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

namespace drdp {

/// Tally of per-slot sub-operations, used to verify that one slot of the
/// reporting + billing pipeline is linear in the number of meters.
struct OpCounter {
  std::uint64_t noise_draws = 0;
  std::uint64_t protections = 0;
  std::uint64_t adjustments = 0;
  std::uint64_t additions = 0;
  std::uint64_t peak_checks = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t bills = 0;

  std::uint64_t total() const {
    return noise_draws + protections + adjustments + additions + peak_checks +
           comparisons + bills;
  }
};

namespace detail {
inline void bump(OpCounter* counter, std::uint64_t OpCounter::*field,
                 std::uint64_t by = 1) {
  if (counter != nullptr) counter->*field += by;
}
}  // namespace detail

}  // namespace drdp
