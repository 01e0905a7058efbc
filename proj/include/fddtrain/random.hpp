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
#include <initializer_list>
#include <random>

#include "fddtrain/numerics.hpp"

namespace fddtrain {

/// What a substream is used for; part of the substream key so that, e.g.,
/// channel draws and noise draws of the same block never share a sequence.
enum class StreamPurpose : std::uint64_t {
  kChannel = 1,
  kNoise = 2,
  kShuffle = 3,
  kCodebook = 4,
  kOracle = 5,
};

/// A seeded pseudo-random sequence with complex-Gaussian helpers.
///
/// Streams are cheap to create. Independent work units derive their own
/// stream from (master seed, counters...) with `substream`, so results do not
/// depend on scheduling order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  static RandomStream substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys);

  double uniform();  // [0, 1)
  double normal();   // N(0, 1)
  /// CN(0, 1): real and imaginary parts each N(0, 1/2).
  Complex complex_normal();
  CVector complex_normal_vector(Eigen::Index n);
  CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to turn structured keys into well-mixed seeds.
std::uint64_t mix64(std::uint64_t x);

/// Haar-distributed n x t matrix with orthonormal columns (t <= n).
CMatrix haar_isometry(Eigen::Index n, Eigen::Index t, RandomStream& rng);

}  // namespace fddtrain
