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

// Smart-meter side: reading ingestion, synthetic load generation and the
// per-slot protected reporting loop.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "drdp/dp_noise.hpp"
#include "drdp/errors.hpp"
#include "drdp/op_counter.hpp"
#include "drdp/random.hpp"
#include "drdp/tariff.hpp"

namespace drdp {

using MeterId = std::uint32_t;
using SlotIndex = std::uint32_t;

inline constexpr SlotIndex kSlotsPerDay = 144;  // 10-minute slots

struct MeterReading {
  MeterId meter_id = 0;
  SlotIndex slot = 0;
  double i_v = 0.0;  // Wh in the slot
};

struct ProtectedReading {
  MeterId meter_id = 0;
  SlotIndex slot = 0;
  double p_v = 0.0;
};

/// Dense meter x slot matrix of true interval energy (Wh). Rows are meters
/// in ascending id order; columns are contiguous slots from first_slot().
class ReadingMatrix {
 public:
  ReadingMatrix() = default;

  ReadingMatrix(std::vector<MeterId> meter_ids, SlotIndex first_slot,
                std::size_t n_slots, std::vector<double> values)
      : meter_ids_(std::move(meter_ids)),
        first_slot_(first_slot),
        n_slots_(n_slots),
        values_(std::move(values)) {
    if (meter_ids_.empty() || n_slots_ == 0)
      throw InputError("reading matrix must have at least one meter and slot");
    if (values_.size() != meter_ids_.size() * n_slots_)
      throw InputError("reading matrix is not fully populated");
    if (!std::is_sorted(meter_ids_.begin(), meter_ids_.end()) ||
        std::adjacent_find(meter_ids_.begin(), meter_ids_.end()) !=
            meter_ids_.end())
      throw InputError("meter ids must be strictly increasing");
    for (double v : values_) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InputError("readings must be finite and non-negative");
    }
  }

  /// Meters 0..n_meters-1, slots 0..n_slots-1.
  static ReadingMatrix dense(std::size_t n_meters, std::size_t n_slots,
                             std::vector<double> values) {
    std::vector<MeterId> ids(n_meters);
    for (std::size_t m = 0; m < n_meters; ++m) ids[m] = static_cast<MeterId>(m);
    return ReadingMatrix(std::move(ids), 0, n_slots, std::move(values));
  }

  std::size_t n_meters() const { return meter_ids_.size(); }
  std::size_t n_slots() const { return n_slots_; }
  std::size_t size() const { return values_.size(); }
  SlotIndex first_slot() const { return first_slot_; }
  SlotIndex slot_at(std::size_t column) const {
    return first_slot_ + static_cast<SlotIndex>(column);
  }
  const std::vector<MeterId>& meter_ids() const { return meter_ids_; }

  double at(std::size_t meter_row, std::size_t column) const {
    return values_[meter_row * n_slots_ + column];
  }
  double& at(std::size_t meter_row, std::size_t column) {
    return values_[meter_row * n_slots_ + column];
  }

  std::span<const double> meter_series(std::size_t meter_row) const {
    return std::span<const double>(values_).subspan(meter_row * n_slots_,
                                                    n_slots_);
  }

  MeterReading reading(std::size_t meter_row, std::size_t column) const {
    return {meter_ids_[meter_row], slot_at(column), at(meter_row, column)};
  }

  friend bool operator==(const ReadingMatrix&, const ReadingMatrix&) = default;

 private:
  std::vector<MeterId> meter_ids_;
  SlotIndex first_slot_ = 0;
  std::size_t n_slots_ = 0;
  std::vector<double> values_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <class T>
std::optional<T> parse_number(std::string_view field) {
  field = trim(field);
  T value{};
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) return std::nullopt;
  return value;
}

}  // namespace detail

/// Parses `meter_id,slot,wh` CSV. `source` names the input in messages.
inline ReadingMatrix parse_csv(std::istream& in,
                               const std::string& source = "<stream>") {
  auto fail = [&](std::size_t line_no, const std::string& what) -> InputError {
    return InputError(source + ":" + std::to_string(line_no) + ": " + what);
  };

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw InputError(source + ": empty file");
  ++line_no;
  if (detail::trim(line) != "meter_id,slot,wh")
    throw fail(line_no, "expected header 'meter_id,slot,wh'");

  std::map<MeterId, std::map<SlotIndex, double>> cells;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = detail::trim(line);
    if (row.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t pos; (pos = row.find(',', start)) != std::string_view::npos;
         start = pos + 1)
      fields.push_back(row.substr(start, pos - start));
    fields.push_back(row.substr(start));
    if (fields.size() != 3) throw fail(line_no, "expected 3 fields");

    auto meter = detail::parse_number<MeterId>(fields[0]);
    auto slot = detail::parse_number<SlotIndex>(fields[1]);
    auto wh = detail::parse_number<double>(fields[2]);
    if (!meter) throw fail(line_no, "malformed meter_id");
    if (!slot) throw fail(line_no, "malformed slot");
    if (!wh || !std::isfinite(*wh)) throw fail(line_no, "non-numeric Wh value");
    if (*wh < 0.0) throw fail(line_no, "negative Wh value");

    auto [it, inserted] = cells[*meter].emplace(*slot, *wh);
    if (!inserted)
      throw fail(line_no, "duplicate reading for meter " +
                              std::to_string(*meter) + " slot " +
                              std::to_string(*slot));
  }
  if (cells.empty()) throw InputError(source + ": no readings");

  // Each meter must cover the same contiguous slot range.
  SlotIndex first = cells.begin()->second.begin()->first;
  SlotIndex last = first;
  for (const auto& [meter, slots] : cells) {
    first = std::min(first, slots.begin()->first);
    last = std::max(last, slots.rbegin()->first);
  }
  const std::size_t n_slots = static_cast<std::size_t>(last - first) + 1;

  std::vector<MeterId> ids;
  std::vector<double> values;
  values.reserve(cells.size() * n_slots);
  for (const auto& [meter, slots] : cells) {
    ids.push_back(meter);
    SlotIndex expected = first;
    for (const auto& [slot, wh] : slots) {
      if (slot != expected)
        throw InputError(source + ": gap in slot sequence for meter " +
                         std::to_string(meter) + " at slot " +
                         std::to_string(expected));
      values.push_back(wh);
      ++expected;
    }
    if (expected != last + 1)
      throw InputError(source + ": gap in slot sequence for meter " +
                       std::to_string(meter) + " at slot " +
                       std::to_string(expected));
  }
  return ReadingMatrix(std::move(ids), first, n_slots, std::move(values));
}

inline ReadingMatrix load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_csv(in, path.string());
}

/// Two-peak daily load shape. A meter's reading in a slot is
///   base_wh + f_m * bump(t) * max(0, 1 + jitter * z)
/// where bump is a sum of two Gaussian bumps centred on the morning and
/// evening hours, f_m is the meter's amplitude factor and z ~ N(0, 1).
struct DailyProfile {
  double base_wh = 400.0;
  double morning_peak_wh = 1100.0;
  double morning_hour = 8.0;
  double morning_width_h = 1.0;
  double evening_peak_wh = 1300.0;
  double evening_hour = 19.0;
  double evening_width_h = 1.5;
  double jitter = 0.08;
  double meter_spread = 0.3;     // f_m uniform in [1 - spread, 1 + spread]
  double day_shift_h = 0.25;     // peak hours wander by up to this much
  std::size_t cooperative_meters = 0;  // the first k meters scale f_m down
  double cooperative_scale = 0.35;

  bool is_degenerate() const {
    return morning_peak_wh == 0.0 && evening_peak_wh == 0.0;
  }
};

struct Synthesized {
  ReadingMatrix readings;
  std::optional<std::string> warning;
};

inline Synthesized synthesize(std::size_t n_meters, std::size_t n_days,
                              const DailyProfile& profile,
                              std::uint64_t seed) {
  if (n_meters == 0) throw ParameterError("n_meters must be >= 1");
  if (n_days == 0) throw ParameterError("n_days must be >= 1");
  if (!(profile.base_wh >= 0.0) || profile.morning_peak_wh < 0.0 ||
      profile.evening_peak_wh < 0.0 || !(profile.morning_width_h > 0.0) ||
      !(profile.evening_width_h > 0.0) || profile.jitter < 0.0 ||
      profile.meter_spread < 0.0 || profile.meter_spread > 1.0 ||
      profile.cooperative_scale < 0.0)
    throw ParameterError("invalid daily profile");

  RandomStream rng = RandomStream::for_stream(seed, kSynthesisStream);
  auto normal = [&rng] {
    const double u1 = rng.uniform_open();
    const double u2 = rng.uniform_open();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  };
  auto bump = [](double t, double centre, double width) {
    const double z = (t - centre) / width;
    return std::exp(-0.5 * z * z);
  };

  const std::size_t n_slots = n_days * kSlotsPerDay;
  std::vector<double> values(n_meters * n_slots);
  for (std::size_t m = 0; m < n_meters; ++m) {
    double factor = 1.0 + profile.meter_spread * (2.0 * rng.uniform_open() - 1.0);
    if (m < profile.cooperative_meters) factor *= profile.cooperative_scale;
    for (std::size_t d = 0; d < n_days; ++d) {
      const double shift = profile.day_shift_h * (2.0 * rng.uniform_open() - 1.0);
      for (std::size_t s = 0; s < kSlotsPerDay; ++s) {
        const double hour = (static_cast<double>(s) + 0.5) / 6.0;
        const double shape =
            profile.morning_peak_wh *
                bump(hour, profile.morning_hour + shift, profile.morning_width_h) +
            profile.evening_peak_wh *
                bump(hour, profile.evening_hour + shift, profile.evening_width_h);
        const double wobble = std::max(0.0, 1.0 + profile.jitter * normal());
        values[m * n_slots + d * kSlotsPerDay + s] =
            profile.base_wh + factor * shape * wobble;
      }
    }
  }

  Synthesized out{ReadingMatrix::dense(n_meters, n_slots, std::move(values)),
                  std::nullopt};
  if (profile.is_degenerate())
    out.warning = "profile has zero peak amplitude; every reading equals the base load";
  return out;
}

/// Everything one simulation run needs.
struct Scenario {
  ReadingMatrix readings;
  Tariff tariff;
  PrivacyParams meter_params;
  PrivacyParams grid_params;
  std::uint64_t seed = 0;
};

/// One meter-side noise stream per meter row, seeded from the master seed.
inline std::vector<LaplaceNoise> meter_noise_streams(const ReadingMatrix& readings,
                                                     std::uint64_t seed) {
  std::vector<LaplaceNoise> streams;
  streams.reserve(readings.n_meters());
  for (MeterId id : readings.meter_ids())
    streams.emplace_back(RandomStream::for_stream(seed, id));
  return streams;
}

/// Every meter protects its reading for one column with its own source.
/// Output is in meter-id order.
template <NoiseSource S>
std::vector<ProtectedReading> report_slot(const ReadingMatrix& readings,
                                          std::size_t column,
                                          const PrivacyParams& params,
                                          std::span<S> meter_noise,
                                          OpCounter* counter = nullptr) {
  if (column >= readings.n_slots()) throw ContractError("slot out of range");
  if (meter_noise.size() != readings.n_meters())
    throw ContractError("need exactly one noise source per meter");
  std::vector<ProtectedReading> out;
  out.reserve(readings.n_meters());
  for (std::size_t m = 0; m < readings.n_meters(); ++m) {
    const MeterReading r = readings.reading(m, column);
    out.push_back({r.meter_id, r.slot,
                   protect_reading(r.i_v, params, meter_noise[m], counter)});
  }
  return out;
}

}  // namespace drdp
