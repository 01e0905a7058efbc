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

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fddtrain/codebook.hpp"
#include "fddtrain/estimation.hpp"
#include "fddtrain/numerics.hpp"

namespace fddtrain {

/// Downlink training schemes.
enum class StrategyKind {
  kOpenLoopSingleShot,      // round-robin pilots, estimate from current block only
  kOpenLoopMemory,          // round-robin pilots, Kalman tracking
  kClosedLoopMemoryMse,     // B-bit feedback of the MSE-minimizing codebook entry
  kClosedLoopMemorySnr,     // B-bit feedback of the SNR-maximizing codebook entry
  kClosedLoopSingleShotFull,  // unlimited feedback of sqrt(rho) U_[1:T], no memory
  kClosedLoopMemoryFull,      // unlimited feedback of the dominant prediction directions
};

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::kOpenLoopSingleShot,       StrategyKind::kOpenLoopMemory,
    StrategyKind::kClosedLoopMemoryMse,      StrategyKind::kClosedLoopMemorySnr,
    StrategyKind::kClosedLoopSingleShotFull, StrategyKind::kClosedLoopMemoryFull,
};

/// CLI spelling: ol-ss, ol-mem, cl-mem-mse, cl-mem-snr, cl-ss-full, cl-mem-full.
std::string_view to_string(StrategyKind kind);
/// Throws ConfigError for unknown names.
StrategyKind parse_strategy(std::string_view name);

bool uses_memory(StrategyKind kind);
bool uses_codebook(StrategyKind kind);

inline constexpr int kUnboundedFeedback = -1;

/// Training chosen for one block.
struct StrategyDecision {
  CMatrix x;
  int feedback_bits = 0;  // 0 open loop, B for codebook feedback, kUnboundedFeedback otherwise
  std::optional<size_t> codebook_index;
};

/// How the variance/covariance terms of the SNR-metric ratio approximation
/// are evaluated.
enum class MomentConvention {
  /// Constants as published: Var = 4 m^H Rp m + 2 tr(Rp Rp),
  /// Cov = 4 m^H Rc Rp m + 2 tr(Rc Rp Rp).
  kPrinted,
  /// Published constants with the variance trace read as (tr Rp)^2.
  kPrintedSquaredTrace,
  /// Exact moments of circular complex Gaussians:
  /// Var = 2 m^H Rp m + tr(Rp Rp), Cov = 2 m^H Rc Rp m + tr(Rc Rp Rp).
  kCircularGaussian,
};

std::string_view to_string(MomentConvention convention);
/// Accepts printed, printed-squared-trace, circular-gaussian. Throws ConfigError.
MomentConvention parse_moment_convention(std::string_view name);

/// X_i = P_{(i mod 2^B)}, optionally through a permutation of codebook indices.
StrategyDecision select_round_robin(const TrainingCodebook& codebook, size_t block_index,
                                    std::span<const size_t> order = {});

/// Entry maximizing tr(R_p), i.e. minimizing the post-training MSE. Ties go
/// to the lowest index.
StrategyDecision select_min_mse(const TrainingCodebook& codebook, const KalmanState& kalman);

struct SnrObjective {
  double value = 0.0;  // tr(R_p) + ||h_pred||^2 + q
  double q = 0.0;      // approximation of E[h^H R_c h / ||h||^2]
  bool degenerate = false;  // E[alpha2] vanished; value falls back to tr(R_p)
};

/// Expected beamforming SNR after training with `p`, with the ratio term q
/// replaced by its second-order (delta method) approximation.
SnrObjective snr_objective(const CMatrix& p, const KalmanState& kalman,
                           MomentConvention convention = MomentConvention::kPrinted);

StrategyDecision select_max_snr(const TrainingCodebook& codebook, const KalmanState& kalman,
                                MomentConvention convention = MomentConvention::kPrinted);

StrategyDecision select_full_feedback(const KalmanState& kalman, int t_len, double rho);

struct Beamformer {
  CVector w;
  bool fallback = false;  // estimate was ~0, e_1 used instead
};

/// w = h_hat / ||h_hat||, or e_1 when ||h_hat|| < 1e-12.
Beamformer beamformer(const CVector& h_hat);

/// |h^H w|^2
double realized_snr(const CVector& h, const CVector& w);

/// Everything a strategy may look at when picking block i's training.
struct StrategyContext {
  StrategyKind kind = StrategyKind::kOpenLoopMemory;
  const TrainingCodebook* codebook = nullptr;  // required by codebook strategies
  std::span<const size_t> order;               // round-robin permutation (may be empty)
  const KalmanState* kalman = nullptr;         // prediction for block i
  size_t block_index = 0;
  int t_len = 1;
  double rho = 1.0;
  /// Precomputed sqrt(rho) U_[1:T] of R for the single-shot full-feedback scheme.
  const CMatrix* single_shot_optimal = nullptr;
  MomentConvention convention = MomentConvention::kPrinted;
};

StrategyDecision choose_training(const StrategyContext& ctx);

}  // namespace fddtrain
