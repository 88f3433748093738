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

// CSV and JSON report writers. All numbers are formatted with fixed rules
// so that identical runs produce byte-identical files.

#include <cmath>
#include <ostream>
#include <span>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"

#include "drdp/billing.hpp"
#include "drdp/coop.hpp"
#include "drdp/metrics.hpp"

namespace drdp {

/// Bills are kept at full precision internally and rounded to 0.01 cent here.
inline double round_cents(double cents) { return std::round(cents * 100.0) / 100.0; }

inline constexpr std::string_view kSlotReportHeader =
    "slot,meter_id,b_r_wh,peak_in_place,charged_peak,bill_cents,deviation_wh";

inline void write_slot_report(std::ostream& out, const ScenarioRun& run) {
  out << kSlotReportHeader << '\n';
  for (const SlotBillingResult& slot : run.slots) {
    for (const MeterBill& bill : slot.meters) {
      fmt::print(out, "{},{},{:.4f},{},{},{:.2f},{}\n", slot.slot, bill.meter_id,
                 bill.b_r, slot.peak_in_place, bill.charged_peak, bill.i_b,
                 bill.d_f ? fmt::format("{:.4f}", *bill.d_f) : std::string());
    }
  }
}

inline nlohmann::ordered_json run_summary(const ScenarioRun& run) {
  nlohmann::ordered_json meters = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < run.meter_ids.size(); ++m) {
    meters.push_back({{"meter_id", run.meter_ids[m]},
                      {"bill_cents", round_cents(run.accumulated_bills[m])}});
  }
  std::size_t cooperative_slots = 0;
  for (const SlotCoopState& s : measure_coop_state(run.slots))
    cooperative_slots += s.system_cooperative;

  nlohmann::ordered_json j;
  j["slots"] = run.slots.size();
  j["peak_slots"] = run.peak_slots;
  j["cooperative_peak_slots"] = cooperative_slots;
  j["total_energy_wh"] = std::round(run.total_energy_wh * 1e4) / 1e4;
  j["total_bill_cents"] = round_cents(run.total_bill());
  j["meters"] = std::move(meters);
  return j;
}

inline void write_series_csv(std::ostream& out, const MetricSeries& series) {
  out << "x,y\n";
  for (const MetricPoint& p : series.points()) fmt::print(out, "{},{}\n", p.x, p.y);
}

inline nlohmann::ordered_json series_json(const MetricSeries& series) {
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const MetricPoint& p : series.points()) points.push_back({p.x, p.y});
  return {{"x_unit", series.x_unit()},
          {"y_unit", series.y_unit()},
          {"points", std::move(points)}};
}

}  // namespace drdp
