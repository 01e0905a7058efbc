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
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "fddtrain/codebook.hpp"
#include "fddtrain/strategies.hpp"

namespace fddtrain {

/// Either a direct Gauss-Markov coefficient or the Doppler parameters it is
/// derived from through the Jakes model.
struct EtaSource {
  std::optional<double> eta;
  double speed_kmh = 3.0;
  double carrier_hz = 2.5e9;
  double block_s = 5e-3;

  static EtaSource direct(double eta) { return {eta, 3.0, 2.5e9, 5e-3}; }
  static EtaSource doppler(double speed_kmh, double carrier_hz = 2.5e9, double block_s = 5e-3) {
    return {std::nullopt, speed_kmh, carrier_hz, block_s};
  }
  double resolve() const;
};

struct SimConfig {
  int n_tx = 16;
  int t_len = 2;
  double rho = 1.0;  // linear per-pilot SNR
  double a = 0.9;
  EtaSource eta;
  int bits = 6;
  int blocks_per_iteration = 10;
  int iterations = 10000;
  StrategyKind strategy = StrategyKind::kOpenLoopMemory;

  /// Codebook for codebook strategies. When null one is designed with
  /// design_gsp(n_tx, t_len, bits, 1, codebook_budget, codebook_seed) and
  /// rescaled to rho.
  std::shared_ptr<const TrainingCodebook> codebook;
  int codebook_budget = 200;
  std::uint64_t codebook_seed = 1;

  std::uint64_t master_seed = 1;
  bool shuffle_codebook = true;
  /// 0 picks FDDTRAIN_WORKERS or the hardware concurrency.
  int workers = 0;
  MomentConvention convention = MomentConvention::kPrinted;

  /// Throws ConfigError.
  void validate() const;
};

struct BlockMetrics {
  int block_index = 0;
  double mean_gamma = 0.0;  // linear mean of |h^H w|^2
  double gamma_stderr = 0.0;
  double mean_gamma_db = 0.0;  // 10 log10(mean_gamma)
  double gamma_stderr_db = 0.0;  // delta-method propagation of gamma_stderr
  double mean_mse = 0.0;  // mean of ||h - h_hat||^2 / N_t
  double mse_stderr = 0.0;
  double analytic_mse = 0.0;  // mean of tr(R_corr) / N_t
  std::size_t samples = 0;
  std::size_t fallbacks = 0;  // blocks where the beamformer fell back to e_1
};

/// Codebook the run would use (null for strategies without one).
std::shared_ptr<const TrainingCodebook> resolve_codebook(const SimConfig& cfg);

/// Number of worker threads `run` would use for this config.
int resolve_workers(const SimConfig& cfg);

/// Raw per-(iteration, block) outcomes, iteration-major.
struct SimSamples {
  int iterations = 0;
  int blocks = 0;
  std::vector<double> gamma;     // |h^H w|^2
  std::vector<double> mse;       // ||h - h_hat||^2 / N_t
  std::vector<double> analytic;  // tr(R_corr) / N_t
  std::vector<unsigned char> fallback;

  std::size_t slot(int iteration, int block) const {
    return static_cast<std::size_t>(iteration) * static_cast<std::size_t>(blocks) + static_cast<std::size_t>(block);
  }
};

/// Monte Carlo over independent iterations of blocks_per_iteration fading
/// blocks. Channel and noise draws are keyed by (seed, iteration, block), so
/// runs that differ only in strategy see the same channels. The output
/// depends only on the config, not on the worker count.
SimSamples run_samples(const SimConfig& cfg);

/// Per-block means and standard errors, in a fixed summation order.
std::vector<BlockMetrics> summarize(const SimSamples& samples);

/// summarize(run_samples(cfg))
std::vector<BlockMetrics> run(const SimConfig& cfg);

enum class SweepAxis { kNTx, kRho, kA, kTLen, kBits, kStrategy, kEta };

/// Accepts n_tx, rho, a, t_len, bits, strategy, eta. Throws ConfigError.
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

/// Numeric axes take a double (rho linear); the strategy axis a StrategyKind.
using SweepValue = std::variant<double, StrategyKind>;

struct SweepPoint {
  SimConfig config;  // codebook populated when one is used
  std::vector<BlockMetrics> blocks;
};

/// One run per value. Codebooks are designed once per (n_tx, t_len, bits)
/// and rescaled when only rho changes.
std::vector<SweepPoint> run_sweep(const SimConfig& base, SweepAxis axis, const std::vector<SweepValue>& values);

}  // namespace fddtrain
