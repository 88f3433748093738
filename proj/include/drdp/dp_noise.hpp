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

// Laplace noise for meter-side protection and grid-side adjustment.
//
// A meter reports P_v = I_v + |L1| and the utility bills on
// B_R = max(0, P_v - |L2|), with L1 ~ Laplace(mu, df1/eps1) drawn from the
// meter's own stream and L2 ~ Laplace(mu, df2/eps2) drawn from the utility's.
// Noise is sampled independently of the reading it perturbs.

#include <cmath>
#include <concepts>
#include <string>

#include "drdp/errors.hpp"
#include "drdp/op_counter.hpp"
#include "drdp/random.hpp"

namespace drdp {

/// Noise scale for one perturbation stage: delta_f / epsilon.
inline double compute_scale(double delta_f, double epsilon) {
  if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
    throw ParameterError("sensitivity must be positive and finite, got " +
                         std::to_string(delta_f));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be positive and finite, got " +
                         std::to_string(epsilon));
  }
  return delta_f / epsilon;
}

/// (epsilon, mu, delta_f) for one stage, with the derived scale.
class PrivacyParams {
 public:
  static PrivacyParams create(double epsilon, double delta_f,
                              double mu = 0.0) {
    if (!std::isfinite(mu)) throw ParameterError("mu must be finite");
    return PrivacyParams(epsilon, mu, delta_f,
                         compute_scale(delta_f, epsilon));
  }

  double epsilon() const { return epsilon_; }
  double mu() const { return mu_; }
  double delta_f() const { return delta_f_; }
  double scale() const { return scale_; }

  friend bool operator==(const PrivacyParams&, const PrivacyParams&) = default;

 private:
  PrivacyParams(double epsilon, double mu, double delta_f, double scale)
      : epsilon_(epsilon), mu_(mu), delta_f_(delta_f), scale_(scale) {}

  double epsilon_;
  double mu_;
  double delta_f_;
  double scale_;
};

struct NoiseSample {
  double raw = 0.0;        // signed draw, Wh
  double magnitude = 0.0;  // |raw|, Wh

  static NoiseSample from_raw(double raw) { return {raw, std::fabs(raw)}; }
};

/// Inverse-CDF Laplace(mu, scale) draw.
inline NoiseSample sample_laplace(double mu, double scale, RandomStream& rng) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError("Laplace scale must be positive and finite");
  }
  // u in (-1/2, 1/2), never 0 and never +-1/2.
  const double u = rng.uniform_open() - 0.5;
  const double tail = std::log1p(-2.0 * std::fabs(u));
  const double raw = u < 0.0 ? mu + scale * tail : mu - scale * tail;
  return NoiseSample::from_raw(raw);
}

/// Anything that can hand out one noise sample for a given stage.
template <class S>
concept NoiseSource = requires(S& source, const PrivacyParams& params) {
  { source.draw(params) } -> std::same_as<NoiseSample>;
};

/// Production source: Laplace draws from an owned stream.
class LaplaceNoise {
 public:
  explicit LaplaceNoise(RandomStream stream) : stream_(stream) {}

  NoiseSample draw(const PrivacyParams& params) {
    return sample_laplace(params.mu(), params.scale(), stream_);
  }

 private:
  RandomStream stream_;
};

/// The scale -> 0 limit: every draw is exactly zero.
struct ZeroNoise {
  NoiseSample draw(const PrivacyParams&) const { return {}; }
};

/// Always returns the same raw value. Test helper.
class FixedNoise {
 public:
  explicit FixedNoise(double raw) : sample_(NoiseSample::from_raw(raw)) {}
  NoiseSample draw(const PrivacyParams&) const { return sample_; }

 private:
  NoiseSample sample_;
};

/// Meter side: P_v = I_v + |noise|. Always P_v >= I_v.
template <NoiseSource S>
double protect_reading(double i_v, const PrivacyParams& params, S& noise,
                       OpCounter* counter = nullptr) {
  if (!(i_v >= 0.0) || !std::isfinite(i_v)) {
    throw InputError("reading must be a finite non-negative Wh value, got " +
                     std::to_string(i_v));
  }
  const NoiseSample sample = noise.draw(params);
  detail::bump(counter, &OpCounter::noise_draws);
  detail::bump(counter, &OpCounter::protections);
  return i_v + sample.magnitude;
}

/// Grid side: B_R = P_v - |noise|, clamped at zero. Always B_R <= P_v.
template <NoiseSource S>
double adjust_reading(double p_v, const PrivacyParams& params, S& noise,
                      OpCounter* counter = nullptr) {
  if (!(p_v >= 0.0) || !std::isfinite(p_v)) {
    throw InputError(
        "protected reading must be a finite non-negative Wh value, got " +
        std::to_string(p_v));
  }
  const NoiseSample sample = noise.draw(params);
  detail::bump(counter, &OpCounter::noise_draws);
  detail::bump(counter, &OpCounter::adjustments);
  const double b_r = p_v - sample.magnitude;
  return b_r > 0.0 ? b_r : 0.0;
}

/// Standard (unfolded) Laplace mechanism x + L. Not used by the billing
/// pipeline; exposed so the e^epsilon output-ratio bound can be tested.
template <NoiseSource S>
double symmetric_mechanism(double x, const PrivacyParams& params, S& noise) {
  return x + noise.draw(params).raw;
}

}  // namespace drdp
