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

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drdp/billing.hpp"
#include "drdp/dp_noise.hpp"
#include "drdp/errors.hpp"
#include "drdp/metering.hpp"
#include "drdp/random.hpp"

namespace drdp {

struct MetricPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Labelled (x, y) series with strictly increasing x.
class MetricSeries {
 public:
  MetricSeries(std::string label, std::string x_unit, std::string y_unit)
      : label_(std::move(label)),
        x_unit_(std::move(x_unit)),
        y_unit_(std::move(y_unit)) {}

  void add(double x, double y) {
    if (!points_.empty() && !(x > points_.back().x))
      throw ContractError("series x values must be strictly increasing");
    points_.push_back({x, y});
  }

  const std::string& label() const { return label_; }
  const std::string& x_unit() const { return x_unit_; }
  const std::string& y_unit() const { return y_unit_; }
  const std::vector<MetricPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::string label_;
  std::string x_unit_;
  std::string y_unit_;
  std::vector<MetricPoint> points_;
};

/// Mean absolute error sum|P_v - I_v| / N_r.
inline double mae(std::span<const double> protected_values,
                  std::span<const double> original) {
  if (protected_values.size() != original.size())
    throw ContractError("MAE inputs differ in length");
  if (original.empty()) throw ContractError("MAE needs at least one reading");
  double total = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i)
    total += std::fabs(protected_values[i] - original[i]);
  return total / static_cast<double>(original.size());
}

/// Per-meter MAE of `reported` against `truth`, averaged over meters with
/// equal weight. Both matrices must have the same shape.
inline double scenario_mae(const ReadingMatrix& reported, const ReadingMatrix& truth) {
  if (reported.n_meters() != truth.n_meters() || reported.n_slots() != truth.n_slots())
    throw ContractError("MAE matrices differ in shape");
  double sum = 0.0;
  for (std::size_t m = 0; m < truth.n_meters(); ++m)
    sum += mae(reported.meter_series(m), truth.meter_series(m));
  return sum / static_cast<double>(truth.n_meters());
}

/// All readings as reported by the meters (P_v) under `params`.
template <NoiseSource S>
ReadingMatrix protect_all(const ReadingMatrix& readings,
                          const PrivacyParams& params, std::span<S> meter_noise) {
  std::vector<double> values(readings.size());
  for (std::size_t column = 0; column < readings.n_slots(); ++column) {
    const auto reported = report_slot(readings, column, params, meter_noise);
    for (std::size_t m = 0; m < reported.size(); ++m)
      values[m * readings.n_slots() + column] = reported[m].p_v;
  }
  return ReadingMatrix(readings.meter_ids(), readings.first_slot(),
                       readings.n_slots(), std::move(values));
}

namespace detail {

inline std::vector<double> sorted_epsilons(std::span<const double> epsilons) {
  std::vector<double> sorted(epsilons.begin(), epsilons.end());
  for (double e : sorted) compute_scale(1.0, e);  // validates
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("epsilon list contains duplicates");
  return sorted;
}

inline std::uint64_t sweep_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, kSweepStreamBase + index);
}

inline Scenario with_epsilon(const Scenario& base, double epsilon,
                             std::uint64_t seed) {
  Scenario s = base;
  s.meter_params = PrivacyParams::create(epsilon, base.meter_params.delta_f(),
                                         base.meter_params.mu());
  s.grid_params = PrivacyParams::create(epsilon, base.grid_params.delta_f(),
                                        base.grid_params.mu());
  s.seed = seed;
  return s;
}

inline double relative_error(double value, double reference) {
  if (reference == 0.0) {
    if (value == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return std::fabs(value - reference) / reference;
}

}  // namespace detail

/// Meter-side MAE for each epsilon (sorted ascending). Each point is an
/// independent run with streams derived from scenario.seed and the point
/// index.
inline MetricSeries mae_sweep(const Scenario& scenario,
                              std::span<const double> epsilons) {
  MetricSeries series("mae", "epsilon", "Wh");
  const auto sorted = detail::sorted_epsilons(epsilons);
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto params = PrivacyParams::create(
        sorted[k], scenario.meter_params.delta_f(), scenario.meter_params.mu());
    auto streams = meter_noise_streams(scenario.readings,
                                       detail::sweep_seed(scenario.seed, k));
    const ReadingMatrix reported = protect_all(
        scenario.readings, params, std::span<LaplaceNoise>(streams));
    series.add(sorted[k], scenario_mae(reported, scenario.readings));
  }
  return series;
}

/// |accumulated regional bill - no-noise bill| / no-noise bill for each
/// epsilon (applied at both meter and grid side).
inline MetricSeries bill_error_series(const Scenario& scenario,
                                      std::span<const double> epsilons,
                                      NoiseMode mode = NoiseMode::Laplace) {
  MetricSeries series("bill_relative_error", "epsilon", "ratio");
  const auto sorted = detail::sorted_epsilons(epsilons);
  const double reference = run_scenario(scenario, NoiseMode::Off).total_bill();
  if (reference == 0.0)
    throw ContractError("no-noise bill is zero; relative error undefined");
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const Scenario noisy = detail::with_epsilon(
        scenario, sorted[k], detail::sweep_seed(scenario.seed, k));
    const double billed = run_scenario(noisy, mode).total_bill();
    series.add(sorted[k], detail::relative_error(billed, reference));
  }
  return series;
}

/// Running relative bill error of one meter after each slot (x = slots
/// elapsed, 1..n_slots). Uses scenario.seed directly.
inline MetricSeries convergence_series(const Scenario& scenario, double epsilon,
                                       std::size_t meter_row,
                                       NoiseMode mode = NoiseMode::Laplace) {
  if (meter_row >= scenario.readings.n_meters())
    throw ContractError("meter row out of range");
  MetricSeries series("running_bill_error_meter_" +
                          std::to_string(scenario.readings.meter_ids()[meter_row]),
                      "slot", "ratio");
  const Scenario noisy = detail::with_epsilon(scenario, epsilon, scenario.seed);
  const ScenarioRun clean = run_scenario(scenario, NoiseMode::Off);
  const ScenarioRun run = run_scenario(noisy, mode);
  double clean_total = 0.0;
  double noisy_total = 0.0;
  for (std::size_t s = 0; s < run.slots.size(); ++s) {
    clean_total += clean.slots[s].meters[meter_row].i_b;
    noisy_total += run.slots[s].meters[meter_row].i_b;
    series.add(static_cast<double>(s + 1),
               detail::relative_error(noisy_total, clean_total));
  }
  return series;
}

}  // namespace drdp
