// SPDX-License-Identifier: Apache-2.0
//
// fddtrain: downlink training simulator for FDD massive MIMO links
// Copyright (C) 2026 The fddtrain authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "fddtrain/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fddtrain/errors.hpp"

namespace fddtrain {

void ChannelConfig::validate() const {
  if (n_tx < 1) throw DomainError("channel: n_tx must be >= 1");
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("channel: a must lie in [0, 1), got " + std::to_string(a));
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("channel: eta must lie in [0, 1], got " + std::to_string(eta));
  }
}

CMatrix exponential_correlation(int n_tx, double a) {
  if (n_tx < 1) throw DomainError("exponential_correlation: n_tx must be >= 1");
  if (!(a >= 0.0 && a < 1.0)) {
    throw DomainError("exponential_correlation: a must lie in [0, 1), got " + std::to_string(a));
  }
  CMatrix r(n_tx, n_tx);
  for (int j = 0; j < n_tx; ++j) {
    for (int k = 0; k < n_tx; ++k) r(j, k) = std::pow(a, std::abs(j - k));
  }
  return r;
}

double jakes_eta(double v_kmh, double carrier_hz, double tau_s) {
  const double doppler_hz = (v_kmh / 3.6) * carrier_hz / kSpeedOfLight;
  return bessel_j0(2.0 * std::numbers::pi * doppler_hz * tau_s);
}

GaussMarkovChannel::GaussMarkovChannel(const ChannelConfig& cfg)
    : cfg_(cfg), r_(exponential_correlation(cfg.n_tx, cfg.a)) {
  cfg_.validate();
  r_sqrt_ = psd_sqrt(r_);
}

ChannelState GaussMarkovChannel::init_block(RandomStream& rng) const {
  return {0, r_sqrt_ * rng.complex_normal_vector(cfg_.n_tx)};
}

ChannelState GaussMarkovChannel::evolve_block(const ChannelState& state, RandomStream& rng) const {
  const double innovation = std::sqrt(1.0 - cfg_.eta * cfg_.eta);
  ChannelState next{state.block_index + 1, cfg_.eta * state.h};
  if (innovation > 0.0) next.h += innovation * (r_sqrt_ * rng.complex_normal_vector(cfg_.n_tx));
  return next;
}

}  // namespace fddtrain
