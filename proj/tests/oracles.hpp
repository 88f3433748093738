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

// Test-only oracles. Nothing here calls into the library's sampling or
// billing paths; they recompute expected values by independent means.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace drdp::testing {

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n = 200000) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

inline double laplace_pdf(double x, double mu, double b) {
  return std::exp(-std::fabs(x - mu) / b) / (2.0 * b);
}

inline double laplace_cdf(double x, double mu, double b) {
  return x < mu ? 0.5 * std::exp((x - mu) / b) : 1.0 - 0.5 * std::exp(-(x - mu) / b);
}

/// E|L| for L ~ Laplace(0, b) by quadrature of the folded density.
inline double folded_mean_by_quadrature(double b) {
  return simpson([b](double x) { return x * 2.0 * laplace_pdf(x, 0.0, b); }, 0.0,
                 60.0 * b);
}

/// Var(L) for L ~ Laplace(0, b) by quadrature.
inline double variance_by_quadrature(double b) {
  return simpson([b](double x) { return x * x * laplace_pdf(x, 0.0, b); }, -60.0 * b,
                 60.0 * b);
}

/// Two-sided KS statistic of `samples` against `cdf`.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// Monte-Carlo estimate of E[(I + |L1|) - |L2| - I] using std's exponential
/// distribution (|Laplace(0, b)| ~ Exponential(1/b)). No clamping: readings
/// are assumed large relative to b.
inline double round_trip_bias_monte_carlo(double b, int draws, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> folded(1.0 / b);
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += folded(gen) - folded(gen);
  return sum / draws;
}

/// Monte-Carlo E|L| via the exponential representation.
inline double folded_mean_monte_carlo(double b, int draws, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> folded(1.0 / b);
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += folded(gen);
  return sum / draws;
}

}  // namespace drdp::testing
