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

#include <cmath>

#include "drdp/errors.hpp"

namespace drdp {

/// Dynamic tariff. Prices are cents per Wh; peak_factor is the regional Wh
/// threshold per slot.
struct Tariff {
  double unit_price = 10.0;
  double peak_price = 25.0;
  double peak_factor = 12000.0;

  /// Throws ParameterError on non-positive prices or threshold. A peak
  /// price not above the unit price is accepted; callers may warn.
  void validate() const {
    if (!(unit_price > 0.0) || !std::isfinite(unit_price))
      throw ParameterError("unit price must be positive");
    if (!(peak_price > 0.0) || !std::isfinite(peak_price))
      throw ParameterError("peak price must be positive");
    if (!(peak_factor > 0.0) || !std::isfinite(peak_factor))
      throw ParameterError("peak factor must be positive");
  }

  bool has_peak_premium() const { return peak_price > unit_price; }
};

}  // namespace drdp
