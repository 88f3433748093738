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

// Acceptance suite: one PASS/FAIL line per criterion. Thresholds for the
// billing criteria (5% relative error, running-error comparison) are this
// project's own; the reference results only describe the trends.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "drdp/billing.hpp"
#include "drdp/config.hpp"
#include "drdp/coop.hpp"
#include "drdp/dp_noise.hpp"
#include "drdp/metering.hpp"
#include "drdp/metrics.hpp"
#include "dp_ratio_check.hpp"
#include "oracles.hpp"

namespace {

using namespace drdp;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

const std::vector<double> kSweep = {0.01, 0.1, 0.5, 1.0, 2.0};

Scenario synthetic(std::size_t meters, std::size_t days, std::uint64_t seed,
                   const DailyProfile& profile = {}, double eps = 0.5) {
  return {synthesize(meters, days, profile, seed).readings, Tariff{},
          PrivacyParams::create(eps, 1.0), PrivacyParams::create(eps, 1.0), seed};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_sim(const std::string& args) {
  const std::string cmd = std::string(DRDP_SIM_BIN) + " " + args + " >/dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

Outcome mae_anchor() {
  Outcome out;
  const std::vector<double> eps = {0.01};
  const double value = mae_sweep(synthetic(10, 3, 42), eps).points()[0].y;
  out.require(value >= 90.0 && value <= 110.0,
              fmt::format("MAE {:.3f} Wh in [90, 110] at eps=0.01, df=1", value));
  return out;
}

Outcome mae_law() {
  Outcome out;
  const Scenario s = synthetic(10, 7, 42);  // 10080 readings per budget
  const MetricSeries series = mae_sweep(s, kSweep);
  out.require(s.readings.size() >= 10000, fmt::format("{} readings", s.readings.size()));
  for (const MetricPoint& p : series.points()) {
    const double expected = 1.0 / p.x;
    out.require(std::fabs(p.y - expected) <= 0.1 * expected,
                fmt::format("eps={} MAE {:.4f} vs {:.4f}", p.x, p.y, expected));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < series.size(); ++i)
    monotone = monotone && series.points()[i].y <= series.points()[i - 1].y;
  out.require(monotone, "monotone non-increasing");
  return out;
}

Outcome billing_convergence() {
  Outcome out;
  const MetricSeries errors = bill_error_series(synthetic(10, 3, 42), kSweep);
  for (const MetricPoint& p : errors.points())
    out.require(p.y <= 0.05, fmt::format("eps={} regional bill error {:.5f}%", p.x, 100 * p.y));

  double at_14 = 0.0;
  double at_432 = 0.0;
  const int seeds = 20;
  for (int seed = 1; seed <= seeds; ++seed) {
    const MetricSeries run = convergence_series(synthetic(10, 3, seed), 0.01, 0);
    at_14 += run.points()[13].y / seeds;
    at_432 += run.points()[431].y / seeds;
  }
  out.require(at_432 < at_14, fmt::format("mean running error slot 432 {:.5f}% < slot 14 {:.5f}%",
                                          100 * at_432, 100 * at_14));
  return out;
}

Outcome incentive() {
  Outcome out;
  DailyProfile cooperative;
  cooperative.cooperative_meters = 1;
  const Scenario s = synthetic(10, 3, 42, cooperative);
  const ScenarioRun drdp = run_scenario(s, NoiseMode::Off);
  const auto flat = baseline_flat_peak_bill(s.readings, s.tariff);
  out.require(drdp.peak_slots > 0, fmt::format("{} peak slots", drdp.peak_slots));
  out.require(drdp.accumulated_bills[0] < flat[0],
              fmt::format("cooperative home {:.2f} < flat-peak {:.2f} cents ({:.2f}% less)",
                          drdp.accumulated_bills[0], flat[0],
                          100 * (flat[0] - drdp.accumulated_bills[0]) / flat[0]));

  DailyProfile low;
  low.morning_peak_wh = 100.0;
  low.evening_peak_wh = 100.0;
  const Scenario quiet = synthetic(10, 3, 42, low);
  const ScenarioRun quiet_run = run_scenario(quiet, NoiseMode::Off);
  const auto quiet_flat = baseline_flat_peak_bill(quiet.readings, quiet.tariff);
  double a = 0.0, b = 0.0;
  for (std::size_t m = 0; m < quiet_flat.size(); ++m) {
    a += quiet_run.accumulated_bills[m];
    b += quiet_flat[m];
  }
  out.require(quiet_run.peak_slots == 0 && a == b,
              fmt::format("no-peak scenario totals {:.2f} == {:.2f}", a, b));
  return out;
}

Outcome billing_oracle() {
  Outcome out;
  // Slot 0: 9000 + 4000 >= 12000, avg 6000 -> 9000*25 and 4000*10.
  // Slot 1: off-peak -> 3000*10 and 2500*10.
  const Scenario s{ReadingMatrix::dense(2, 2, {9000, 3000, 4000, 2500}), Tariff{},
                   PrivacyParams::create(0.5, 1.0), PrivacyParams::create(0.5, 1.0), 42};
  const ScenarioRun run = run_scenario(s, NoiseMode::Off);
  out.require(run.accumulated_bills[0] == 255000.0 && run.accumulated_bills[1] == 65000.0,
              fmt::format("bills {:.2f}, {:.2f} cents == 255000.00, 65000.00",
                          run.accumulated_bills[0], run.accumulated_bills[1]));

  const fs::path dir = fs::temp_directory_path() / "drdp_acceptance_golden";
  fs::remove_all(dir);
  const std::string data = DRDP_TEST_DATA;
  const int rc = run_sim("--input " + data + "/hand_2x2.csv --noise off --out " + dir.string());
  out.require(rc == 0 && slurp(dir / "report.csv") == slurp(data + "/golden_hand_report.csv"),
              "CLI report.csv == golden file");
  return out;
}

Outcome coop_math() {
  Outcome out;
  double worst = 0.0;
  for (std::size_t n = 1; n <= 16; ++n) {
    for (int k = 1; k <= 9; ++k) {
      const auto model = CoopModel::shared(n, k / 10.0);
      const auto oracle = enumerate_oracle(model);
      worst = std::max({worst, std::fabs(coop_probability(model) - oracle.probability),
                        std::fabs(coop_expectation(model) - oracle.expectation)});
    }
  }
  out.require(worst <= 1e-12, fmt::format("closed form vs enumeration max diff {:.3e}", worst));

  const auto three = CoopModel::shared(3, 0.5);
  out.require(std::fabs(coop_probability(three) - 0.5) <= 1e-12 &&
                  std::fabs(coop_expectation(three) - 1.125) <= 1e-12,
              fmt::format("N=3 p=0.5: P={} E={}", coop_probability(three),
                          coop_expectation(three)));

  bool increasing = true;
  double previous = -1.0;
  for (int k = 1; k <= 9; ++k) {
    const double e = coop_expectation(CoopModel::shared(12, k / 10.0));
    increasing = increasing && e > previous;
    previous = e;
  }
  out.require(increasing, "N=12 expectation strictly increasing in p");
  return out;
}

Outcome noise_distribution() {
  Outcome out;
  const int draws = 100000;
  const double b = 2.0;
  RandomStream rng(2024);
  std::vector<double> raw(draws);
  double folded = 0.0;
  for (double& x : raw) {
    const NoiseSample s = sample_laplace(0.0, b, rng);
    x = s.raw;
    folded += s.magnitude;
  }
  folded /= draws;
  const double ks = testing::ks_statistic(
      raw, [b](double x) { return testing::laplace_cdf(x, 0.0, b); });
  out.require(ks < 0.01, fmt::format("KS {:.5f} < 0.01", ks));
  out.require(std::fabs(folded - b) <= 0.03 * b,
              fmt::format("folded mean {:.4f} within 3% of {}", folded, b));
  for (double eps : {0.5, 1.0}) {
    const auto params = PrivacyParams::create(eps, 1.0);
    const auto check = testing::output_ratio(params, params.scale());
    out.require(check.worst_conservative_ratio <= std::exp(eps) && check.bins_checked >= 10,
                fmt::format("eps={} worst ratio {:.4f} <= e^eps {:.4f} over {} bins", eps,
                            check.worst_conservative_ratio, std::exp(eps),
                            check.bins_checked));
  }
  return out;
}

Outcome determinism() {
  Outcome out;
  for (const auto& [name, mode] : mode_names()) {
    const fs::path a = fs::temp_directory_path() / ("drdp_acceptance_" + name + "_a");
    const fs::path b = fs::temp_directory_path() / ("drdp_acceptance_" + name + "_b");
    fs::remove_all(a);
    fs::remove_all(b);
    const std::string args = "--mode " + name + " --seed 20260101 --epsilon1 0.1 --out ";
    bool same = run_sim(args + a.string()) == 0 && run_sim(args + b.string()) == 0;
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      same = same && slurp(entry.path()) == slurp(b / entry.path().filename());
      ++files;
    }
    out.require(same && files >= 2, fmt::format("{} ({} files)", name, files));
  }
  return out;
}

Outcome linear_scaling() {
  Outcome out;
  const std::vector<std::int64_t> sizes = {10, 100, 1000};
  // Column 0 is a peak slot, column 1 an off-peak slot; each is counted on
  // its own and must lie exactly on a line in N.
  std::vector<std::int64_t> peak_counts, offpeak_counts;
  for (std::int64_t n : sizes) {
    std::vector<double> values;
    for (std::int64_t m = 0; m < n; ++m) {
      values.push_back(3.0 * 12000.0 / static_cast<double>(n));
      values.push_back(0.1 * 12000.0 / static_cast<double>(n));
    }
    const Scenario s{ReadingMatrix::dense(n, 2, values), Tariff{},
                     PrivacyParams::create(1.0, 1.0), PrivacyParams::create(1.0, 1.0), 7};
    auto meters = meter_noise_streams(s.readings, s.seed);
    LaplaceNoise utility(RandomStream::for_stream(s.seed, kUtilityStream));
    for (std::size_t column : {0u, 1u}) {
      OpCounter counter;
      const SlotBillingResult slot =
          run_slot(s, column, std::span<LaplaceNoise>(meters), utility, &counter);
      out.require(slot.peak_in_place == (column == 0),
                  fmt::format("N={} slot {} peak={}", n, column, slot.peak_in_place));
      (column == 0 ? peak_counts : offpeak_counts)
          .push_back(static_cast<std::int64_t>(counter.total()));
    }
  }
  auto fits_line = [&](const std::vector<std::int64_t>& counts, const char* label) {
    const std::int64_t a = (counts[1] - counts[0]) / (sizes[1] - sizes[0]);
    const std::int64_t b = counts[0] - a * sizes[0];
    bool exact = true;
    for (std::size_t i = 0; i < sizes.size(); ++i)
      exact = exact && counts[i] == a * sizes[i] + b;
    out.require(exact, fmt::format("{} slot ops {}, {}, {} == {}*N + {}", label, counts[0],
                                   counts[1], counts[2], a, b));
  };
  fits_line(peak_counts, "peak");
  fits_line(offpeak_counts, "off-peak");
  return out;
}

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0: no limit
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "MAE anchor", 5.0, mae_anchor},
      {2, "MAE law across the sweep", 30.0, mae_law},
      {3, "billing convergence", 60.0, billing_convergence},
      {4, "incentive property", 0.0, incentive},
      {5, "billing oracle", 0.0, billing_oracle},
      {6, "cooperative-state math", 5.0, coop_math},
      {7, "noise distribution", 0.0, noise_distribution},
      {8, "determinism", 0.0, determinism},
      {9, "linear scaling", 0.0, linear_scaling},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0.0)
      outcome.require(elapsed < c.time_limit_s,
                      fmt::format("{:.2f} s < {:.0f} s", elapsed, c.time_limit_s));
    failures += !outcome.pass;
    fmt::print("[{}] {}. {} ({:.2f} s): {}\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
               elapsed, outcome.detail);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
