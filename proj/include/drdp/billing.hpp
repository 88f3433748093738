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

// Grid utility side: noise adjustment, regional peak detection and
// per-home dynamic billing.
//
// In a peak slot (regional sum of bill readings >= peak_factor) each home is
// compared with the fair share avg = peak_factor / N. Homes at or above avg
// pay the peak price and are told how far above they are; homes below avg
// cooperate, pay the unit price and are told their remaining headroom.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drdp/dp_noise.hpp"
#include "drdp/errors.hpp"
#include "drdp/metering.hpp"
#include "drdp/op_counter.hpp"
#include "drdp/tariff.hpp"

namespace drdp {

struct AdjustedReading {
  MeterId meter_id = 0;
  double b_r = 0.0;
};

struct PeakDecision {
  bool peak_in_place = false;
  double regional_sum = 0.0;
  std::optional<double> average;  // set iff peak_in_place
};

struct MeterBill {
  MeterId meter_id = 0;
  double b_r = 0.0;
  bool charged_peak = false;
  double i_b = 0.0;              // cents
  std::optional<double> d_f;     // |b_r - avg|, peak slots only
};

struct SlotBillingResult {
  SlotIndex slot = 0;
  bool peak_in_place = false;
  double regional_sum = 0.0;
  std::optional<double> average;
  std::vector<MeterBill> meters;

  std::size_t cooperative_count() const {
    std::size_t q = 0;
    for (const MeterBill& bill : meters) q += peak_in_place && !bill.charged_peak;
    return q;
  }
};

template <NoiseSource S>
std::vector<AdjustedReading> adjust_slot(
    std::span<const ProtectedReading> protected_readings,
    const PrivacyParams& grid_params, S& utility_noise,
    OpCounter* counter = nullptr) {
  std::vector<AdjustedReading> out;
  out.reserve(protected_readings.size());
  for (const ProtectedReading& r : protected_readings) {
    out.push_back(
        {r.meter_id, adjust_reading(r.p_v, grid_params, utility_noise, counter)});
  }
  return out;
}

inline PeakDecision detect_peak(std::span<const AdjustedReading> adjusted,
                                const Tariff& tariff,
                                OpCounter* counter = nullptr) {
  if (adjusted.empty()) throw ContractError("peak detection needs at least one meter");
  PeakDecision decision;
  for (const AdjustedReading& r : adjusted) decision.regional_sum += r.b_r;
  detail::bump(counter, &OpCounter::additions, adjusted.size());
  detail::bump(counter, &OpCounter::peak_checks);
  decision.peak_in_place = decision.regional_sum >= tariff.peak_factor;
  if (decision.peak_in_place)
    decision.average = tariff.peak_factor / static_cast<double>(adjusted.size());
  return decision;
}

inline SlotBillingResult bill_slot(SlotIndex slot,
                                   std::span<const AdjustedReading> adjusted,
                                   bool peak_in_place,
                                   std::optional<double> average,
                                   const Tariff& tariff,
                                   OpCounter* counter = nullptr) {
  if (peak_in_place != average.has_value())
    throw ContractError("average must be set exactly when the peak is in place");

  SlotBillingResult result;
  result.slot = slot;
  result.peak_in_place = peak_in_place;
  result.average = average;
  result.meters.reserve(adjusted.size());
  for (const AdjustedReading& r : adjusted) {
    result.regional_sum += r.b_r;
    MeterBill bill{r.meter_id, r.b_r, false, 0.0, std::nullopt};
    if (peak_in_place) {
      detail::bump(counter, &OpCounter::comparisons);
      if (r.b_r >= *average) {
        bill.charged_peak = true;
        bill.i_b = r.b_r * tariff.peak_price;
        bill.d_f = r.b_r - *average;
      } else {
        bill.i_b = r.b_r * tariff.unit_price;
        bill.d_f = *average - r.b_r;
      }
    } else {
      bill.i_b = r.b_r * tariff.unit_price;
    }
    detail::bump(counter, &OpCounter::bills);
    result.meters.push_back(bill);
  }
  return result;
}

inline SlotBillingResult bill_slot(SlotIndex slot,
                                   std::span<const AdjustedReading> adjusted,
                                   const PeakDecision& decision,
                                   const Tariff& tariff,
                                   OpCounter* counter = nullptr) {
  SlotBillingResult result = bill_slot(slot, adjusted, decision.peak_in_place,
                                       decision.average, tariff, counter);
  result.regional_sum = decision.regional_sum;
  return result;
}

struct ScenarioRun {
  std::vector<SlotBillingResult> slots;
  std::vector<MeterId> meter_ids;
  std::vector<double> accumulated_bills;  // cents, per meter row
  double total_energy_wh = 0.0;           // sum of all bill readings
  std::size_t peak_slots = 0;

  double total_bill() const {
    double total = 0.0;
    for (double b : accumulated_bills) total += b;
    return total;
  }
};

/// One slot of the pipeline: report -> adjust -> detect -> bill.
template <NoiseSource MeterSource, NoiseSource GridSource>
SlotBillingResult run_slot(const Scenario& scenario, std::size_t column,
                           std::span<MeterSource> meter_noise,
                           GridSource& utility_noise,
                           OpCounter* counter = nullptr) {
  const auto reported = report_slot(scenario.readings, column,
                                    scenario.meter_params, meter_noise, counter);
  const auto adjusted =
      adjust_slot(std::span<const ProtectedReading>(reported),
                  scenario.grid_params, utility_noise, counter);
  const PeakDecision decision =
      detect_peak(adjusted, scenario.tariff, counter);
  return bill_slot(scenario.readings.slot_at(column), adjusted, decision,
                   scenario.tariff, counter);
}

template <NoiseSource MeterSource, NoiseSource GridSource>
ScenarioRun run_scenario_with(const Scenario& scenario,
                              std::span<MeterSource> meter_noise,
                              GridSource& utility_noise,
                              OpCounter* counter = nullptr) {
  scenario.tariff.validate();
  const ReadingMatrix& readings = scenario.readings;
  ScenarioRun run;
  run.meter_ids = readings.meter_ids();
  run.accumulated_bills.assign(readings.n_meters(), 0.0);
  run.slots.reserve(readings.n_slots());
  for (std::size_t column = 0; column < readings.n_slots(); ++column) {
    SlotBillingResult slot =
        run_slot(scenario, column, meter_noise, utility_noise, counter);
    for (std::size_t m = 0; m < slot.meters.size(); ++m)
      run.accumulated_bills[m] += slot.meters[m].i_b;
    run.total_energy_wh += slot.regional_sum;
    run.peak_slots += slot.peak_in_place;
    run.slots.push_back(std::move(slot));
  }
  return run;
}

enum class NoiseMode { Laplace, Off };

/// Full run with per-meter streams and one utility stream derived from
/// scenario.seed. NoiseMode::Off replaces every draw with zero.
inline ScenarioRun run_scenario(const Scenario& scenario,
                                NoiseMode mode = NoiseMode::Laplace,
                                OpCounter* counter = nullptr) {
  if (mode == NoiseMode::Off) {
    std::vector<ZeroNoise> meters(scenario.readings.n_meters());
    ZeroNoise utility;
    return run_scenario_with(scenario, std::span<ZeroNoise>(meters), utility,
                             counter);
  }
  auto meters = meter_noise_streams(scenario.readings, scenario.seed);
  LaplaceNoise utility(RandomStream::for_stream(scenario.seed, kUtilityStream));
  return run_scenario_with(scenario, std::span<LaplaceNoise>(meters), utility,
                           counter);
}

/// Flat-peak comparison scheme: peak detection on the true regional sum,
/// and every home pays the peak price whenever the peak is in place.
/// Returns accumulated cents per meter row.
inline std::vector<double> baseline_flat_peak_bill(const ReadingMatrix& readings,
                                                   const Tariff& tariff) {
  tariff.validate();
  std::vector<double> bills(readings.n_meters(), 0.0);
  for (std::size_t column = 0; column < readings.n_slots(); ++column) {
    double sum = 0.0;
    for (std::size_t m = 0; m < readings.n_meters(); ++m) sum += readings.at(m, column);
    const double price = sum >= tariff.peak_factor ? tariff.peak_price : tariff.unit_price;
    for (std::size_t m = 0; m < readings.n_meters(); ++m)
      bills[m] += readings.at(m, column) * price;
  }
  return bills;
}

}  // namespace drdp
