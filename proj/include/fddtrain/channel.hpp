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

#pragma once

#include <cstdint>

#include "fddtrain/numerics.hpp"
#include "fddtrain/random.hpp"

namespace fddtrain {

inline constexpr double kSpeedOfLight = 3e8;

/// Statistics of a spatially and temporally correlated block-fading channel.
struct ChannelConfig {
  int n_tx = 1;
  double a = 0.0;    // exponential spatial correlation, [0, 1)
  double eta = 1.0;  // block-to-block Gauss-Markov coefficient, [0, 1]
  std::uint64_t seed = 0;

  /// Throws DomainError when a parameter is outside its range.
  void validate() const;
};

/// True channel vector of one fading block.
struct ChannelState {
  int block_index = 0;
  CVector h;
};

/// N x N matrix with entries a^|j-k|; unit diagonal so trace == n_tx.
CMatrix exponential_correlation(int n_tx, double a);

/// Jakes temporal correlation J0(2*pi*f_D*tau) with f_D = v * f_c / c.
double jakes_eta(double v_kmh, double carrier_hz, double tau_s);

/// Gauss-Markov evolution h_i = eta h_{i-1} + sqrt(1 - eta^2) R^{1/2} g_i.
///
/// R and R^{1/2} are computed once at construction; R does not change over
/// the lifetime of a model.
class GaussMarkovChannel {
 public:
  explicit GaussMarkovChannel(const ChannelConfig& cfg);

  const ChannelConfig& config() const { return cfg_; }
  const CMatrix& correlation() const { return r_; }
  const CMatrix& correlation_sqrt() const { return r_sqrt_; }

  /// h_0 = R^{1/2} g_0.
  ChannelState init_block(RandomStream& rng) const;
  ChannelState evolve_block(const ChannelState& state, RandomStream& rng) const;

 private:
  ChannelConfig cfg_;
  CMatrix r_;
  CMatrix r_sqrt_;
};

}  // namespace fddtrain
