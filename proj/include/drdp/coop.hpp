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

// Cooperative-state model. With N meters, each cooperating (staying below
// the fair share in a peak slot) with probability p, the system is
// cooperative when at least ceil(N/2) meters cooperate:
//
//   P_cs   = sum_{q=ceil(N/2)}^{N} C(N,q) p^q (1-p)^(N-q)
//   E_cs   = sum_{q=ceil(N/2)}^{N} q C(N,q) p^q (1-p)^(N-q)
//
// E_cs is the truncated expectation, not N*p. The closed forms assume a
// shared p; heterogeneous per-meter probabilities go through the 2^N
// enumeration oracle.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drdp/billing.hpp"
#include "drdp/errors.hpp"

namespace drdp {

inline constexpr std::size_t kMaxExactBinomialN = 64;
inline constexpr std::size_t kMaxEnumerationN = 20;

class CoopModel {
 public:
  static CoopModel shared(std::size_t n, double p) {
    if (n == 0) throw ParameterError("meter count must be positive");
    check_probability(p);
    return CoopModel(std::vector<double>(n, p), true);
  }

  static CoopModel heterogeneous(std::vector<double> p_lu) {
    if (p_lu.empty()) throw ParameterError("meter count must be positive");
    for (double p : p_lu) check_probability(p);
    return CoopModel(std::move(p_lu), false);
  }

  std::size_t n() const { return p_lu_.size(); }
  bool is_shared() const { return shared_; }
  double p_lu(std::size_t i) const { return p_lu_.at(i); }
  double p_hu(std::size_t i) const { return 1.0 - p_lu_.at(i); }
  std::span<const double> p_lu() const { return p_lu_; }

  /// The shared probability; throws for heterogeneous models.
  double shared_p() const {
    if (!shared_)
      throw ParameterError(
          "closed form needs a shared probability; use enumerate_oracle for "
          "per-meter probabilities");
    return p_lu_.front();
  }

 private:
  CoopModel(std::vector<double> p_lu, bool shared)
      : p_lu_(std::move(p_lu)), shared_(shared) {}

  static void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ParameterError("probability must lie in [0, 1], got " +
                           std::to_string(p));
  }

  std::vector<double> p_lu_;
  bool shared_;
};

/// ceil(n / 2)
constexpr std::size_t cooperative_threshold(std::size_t n) { return (n + 1) / 2; }

/// Exact C(n, k) for n <= 64 via Pascal's rule (no intermediate overflow).
inline std::uint64_t binomial_coefficient(std::size_t n, std::size_t k) {
  if (n > kMaxExactBinomialN)
    throw ParameterError("exact binomial coefficients limited to n <= 64");
  if (k > n) return 0;
  std::vector<std::uint64_t> row(k + 1, 0);
  row[0] = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = std::min(i, k); j > 0; --j) row[j] += row[j - 1];
  }
  return row[k];
}

/// P(S = q) for S ~ Binomial(n, p).
inline double binomial_pmf(std::size_t n, std::size_t q, double p) {
  return static_cast<double>(binomial_coefficient(n, q)) *
         std::pow(p, static_cast<double>(q)) *
         std::pow(1.0 - p, static_cast<double>(n - q));
}

namespace detail {
inline double truncated_sum(std::size_t n, double p, std::size_t from,
                            std::size_t to, bool weight_by_q) {
  double total = 0.0;
  for (std::size_t q = from; q <= to; ++q) {
    const double term = binomial_pmf(n, q, p);
    total += weight_by_q ? static_cast<double>(q) * term : term;
  }
  return total;
}
}  // namespace detail

inline double coop_probability(const CoopModel& model) {
  const double p = model.shared_p();
  return detail::truncated_sum(model.n(), p, cooperative_threshold(model.n()),
                               model.n(), false);
}

/// Probability of at most floor(N/2) cooperators. For even N the q = N/2
/// term is also counted by coop_probability, so the two only sum to one
/// for odd N.
inline double non_coop_probability(const CoopModel& model) {
  const double p = model.shared_p();
  return detail::truncated_sum(model.n(), p, 0, model.n() / 2, false);
}

inline double coop_expectation(const CoopModel& model) {
  const double p = model.shared_p();
  return detail::truncated_sum(model.n(), p, cooperative_threshold(model.n()),
                               model.n(), true);
}

namespace detail {
/// Neumaier-compensated running sum; the oracle adds up to 2^20 terms.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};
}  // namespace detail

struct EnumerationResult {
  double probability = 0.0;
  double expectation = 0.0;  // sum of q * P(pattern) over qualifying patterns
};

/// Exhaustive sum over all 2^n cooperation patterns with per-meter
/// probabilities. Patterns with at least `threshold` cooperators count.
inline EnumerationResult enumerate_oracle(const CoopModel& model,
                                          std::size_t threshold) {
  const std::size_t n = model.n();
  if (n > kMaxEnumerationN)
    throw ParameterError("enumeration limited to n <= 20 meters");
  detail::CompensatedSum probability;
  detail::CompensatedSum expectation;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    const auto q = static_cast<std::size_t>(std::popcount(mask));
    if (q < threshold) continue;
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      prob *= (mask >> i) & 1U ? model.p_lu(i) : model.p_hu(i);
    probability.add(prob);
    expectation.add(static_cast<double>(q) * prob);
  }
  return {probability.value(), expectation.value()};
}

inline EnumerationResult enumerate_oracle(const CoopModel& model) {
  return enumerate_oracle(model, cooperative_threshold(model.n()));
}

struct SlotCoopState {
  SlotIndex slot = 0;
  std::size_t cooperative_meters = 0;  // q: homes strictly below the average
  bool system_cooperative = false;     // q >= ceil(N/2)
};

/// Observed cooperative state of every peak slot; off-peak slots skipped.
inline std::vector<SlotCoopState> measure_coop_state(
    std::span<const SlotBillingResult> slots) {
  std::vector<SlotCoopState> out;
  for (const SlotBillingResult& slot : slots) {
    if (!slot.peak_in_place) continue;
    std::size_t q = 0;
    for (const MeterBill& bill : slot.meters) q += bill.b_r < *slot.average;
    out.push_back({slot.slot, q, q >= cooperative_threshold(slot.meters.size())});
  }
  return out;
}

}  // namespace drdp
