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

// Mode dispatch for the simulator CLI. Every mode writes its reports under
// config.output_dir and prints a one-line summary.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"

#include "drdp/billing.hpp"
#include "drdp/config.hpp"
#include "drdp/coop.hpp"
#include "drdp/metering.hpp"
#include "drdp/metrics.hpp"
#include "drdp/report.hpp"

namespace drdp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

namespace detail {

inline std::ofstream open_report(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

inline void write_json(const std::filesystem::path& path,
                       const nlohmann::ordered_json& j) {
  auto out = open_report(path);
  out << j.dump(2) << '\n';
}

inline Scenario build_scenario(const RunConfig& c, std::ostream& log) {
  ReadingMatrix readings;
  if (c.input) {
    readings = load_csv(*c.input);
  } else {
    DailyProfile profile;
    profile.cooperative_meters = c.cooperative_homes;
    auto synth = synthesize(c.meters, c.synth_days, profile, c.seed);
    if (synth.warning) log << "warning: " << *synth.warning << '\n';
    readings = std::move(synth.readings);
  }
  return {std::move(readings), c.tariff(), c.meter_params(), c.grid_params(), c.seed};
}

inline nlohmann::ordered_json with_config(const RunConfig& c,
                                          nlohmann::ordered_json body) {
  nlohmann::ordered_json j;
  j["config"] = to_json(c);
  for (auto& [key, value] : body.items()) j[key] = value;
  return j;
}

inline void emit_series(const RunConfig& c, const std::filesystem::path& dir,
                        const std::string& csv_name, const MetricSeries& series) {
  auto csv = open_report(dir / csv_name);
  write_series_csv(csv, series);
  nlohmann::ordered_json body;
  body[series.label()] = series_json(series);
  write_json(dir / "metrics.json", with_config(c, std::move(body)));
}

}  // namespace detail

/// Runs the configured mode. Returns a process exit code; errors are
/// reported on `log`.
inline int execute(const RunConfig& c, std::ostream& out, std::ostream& log) {
  namespace fs = std::filesystem;
  try {
    const fs::path dir(c.output_dir);
    fs::create_directories(dir);

    if (c.mode == Mode::CoopTable) {
      auto csv = detail::open_report(dir / "coop_table.csv");
      csv << "p,probability,expectation\n";
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (int k = 1; k <= 9; ++k) {
        const double p = k / 10.0;
        const CoopModel model = CoopModel::shared(c.coop_n, p);
        const double prob = coop_probability(model);
        const double expectation = coop_expectation(model);
        fmt::print(csv, "{},{},{}\n", p, prob, expectation);
        rows.push_back({{"p", p}, {"probability", prob}, {"expectation", expectation}});
      }
      detail::write_json(dir / "summary.json",
                         detail::with_config(c, {{"n", c.coop_n}, {"rows", rows}}));
      fmt::print(out, "coop-table: N={} expectation {:.4f} at p=0.1 .. {:.4f} at p=0.9\n",
                 c.coop_n, rows.front()["expectation"].get<double>(),
                 rows.back()["expectation"].get<double>());
      return kExitOk;
    }

    const Scenario scenario = detail::build_scenario(c, log);
    const auto& readings = scenario.readings;

    switch (c.mode) {
      case Mode::Run: {
        const ScenarioRun run =
            run_scenario(scenario, c.noise ? NoiseMode::Laplace : NoiseMode::Off);
        auto csv = detail::open_report(dir / "report.csv");
        write_slot_report(csv, run);
        detail::write_json(dir / "summary.json", detail::with_config(c, run_summary(run)));
        fmt::print(out, "run: {} meters x {} slots, {} peak slots, total bill {:.2f} cents\n",
                   readings.n_meters(), readings.n_slots(), run.peak_slots,
                   round_cents(run.total_bill()));
        break;
      }
      case Mode::MaeSweep: {
        const MetricSeries series = mae_sweep(scenario, c.epsilons);
        detail::emit_series(c, dir, "mae_sweep.csv", series);
        fmt::print(out, "mae-sweep: MAE {:.3f} Wh at epsilon {} .. {:.3f} Wh at epsilon {}\n",
                   series.points().front().y, series.points().front().x,
                   series.points().back().y, series.points().back().x);
        break;
      }
      case Mode::BillError: {
        const MetricSeries series = bill_error_series(
            scenario, c.epsilons, c.noise ? NoiseMode::Laplace : NoiseMode::Off);
        detail::emit_series(c, dir, "bill_error.csv", series);
        double worst = 0.0;
        for (const MetricPoint& p : series.points()) worst = std::max(worst, p.y);
        fmt::print(out, "bill-error: worst relative bill error {:.4f}% over {} budgets\n",
                   100.0 * worst, series.size());
        break;
      }
      case Mode::Convergence: {
        if (c.meter >= readings.n_meters())
          throw ContractError("meter row " + std::to_string(c.meter) + " out of range");
        const MetricSeries series =
            convergence_series(scenario, c.epsilon1, c.meter,
                               c.noise ? NoiseMode::Laplace : NoiseMode::Off);
        detail::emit_series(c, dir, "convergence.csv", series);
        fmt::print(out, "convergence: running bill error {:.4f}% after 1 slot, {:.4f}% after {}\n",
                   100.0 * series.points().front().y, 100.0 * series.points().back().y,
                   series.size());
        break;
      }
      case Mode::BaselineCompare: {
        const ScenarioRun drdp = run_scenario(scenario, NoiseMode::Off);
        const auto baseline = baseline_flat_peak_bill(readings, scenario.tariff);
        auto csv = detail::open_report(dir / "baseline_compare.csv");
        csv << "meter_id,drdp_cents,baseline_cents,saving_pct\n";
        nlohmann::ordered_json meters = nlohmann::ordered_json::array();
        double drdp_total = 0.0;
        double baseline_total = 0.0;
        for (std::size_t m = 0; m < readings.n_meters(); ++m) {
          const double ours = drdp.accumulated_bills[m];
          const double theirs = baseline[m];
          const double saving = theirs > 0.0 ? 100.0 * (theirs - ours) / theirs : 0.0;
          drdp_total += ours;
          baseline_total += theirs;
          fmt::print(csv, "{},{:.2f},{:.2f},{:.4f}\n", readings.meter_ids()[m], ours,
                     theirs, saving);
          meters.push_back({{"meter_id", readings.meter_ids()[m]},
                            {"drdp_cents", round_cents(ours)},
                            {"baseline_cents", round_cents(theirs)}});
        }
        detail::write_json(
            dir / "summary.json",
            detail::with_config(c, {{"drdp_total_cents", round_cents(drdp_total)},
                                    {"baseline_total_cents", round_cents(baseline_total)},
                                    {"peak_slots", drdp.peak_slots},
                                    {"meters", meters}}));
        fmt::print(out, "baseline-compare: DRDP {:.2f} cents vs flat-peak {:.2f} cents\n",
                   round_cents(drdp_total), round_cents(baseline_total));
        break;
      }
      case Mode::CoopTable:
        break;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace drdp
