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

#include "fddtrain/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fddtrain/errors.hpp"

namespace fddtrain {

namespace {

struct NamedStrategy {
  StrategyKind kind;
  std::string_view name;
};

constexpr NamedStrategy kStrategyNames[] = {
    {StrategyKind::kOpenLoopSingleShot, "ol-ss"},
    {StrategyKind::kOpenLoopMemory, "ol-mem"},
    {StrategyKind::kClosedLoopMemoryMse, "cl-mem-mse"},
    {StrategyKind::kClosedLoopMemorySnr, "cl-mem-snr"},
    {StrategyKind::kClosedLoopSingleShotFull, "cl-ss-full"},
    {StrategyKind::kClosedLoopMemoryFull, "cl-mem-full"},
};

void require_codebook_fits(const TrainingCodebook& codebook, const KalmanState& kalman) {
  if (codebook.entries.empty()) throw ConfigError("strategy: empty codebook");
  if (codebook.n_tx != kalman.r_pred.rows()) throw DimensionError("strategy: codebook n_tx does not match state");
}

bool beats(double candidate, double best) {
  return candidate > best + 1e-12 * std::max(1.0, std::abs(best));
}

// R_pred P_k and R_pred^2 P_k for every candidate, as two wide products.
struct CandidateProducts {
  CMatrix a_all;
  CMatrix b_all;
  Eigen::Index t = 0;

  CandidateProducts(const std::vector<CMatrix>& candidates, const CMatrix& r_pred, bool second_power) {
    t = candidates.front().cols();
    CMatrix stacked(r_pred.rows(), t * static_cast<Eigen::Index>(candidates.size()));
    for (size_t k = 0; k < candidates.size(); ++k) {
      if (candidates[k].rows() != r_pred.rows() || candidates[k].cols() != t) {
        throw DimensionError("strategy: candidate training matrices differ in shape");
      }
      stacked.middleCols(static_cast<Eigen::Index>(k) * t, t) = candidates[k];
    }
    a_all.noalias() = r_pred * stacked;
    if (second_power) b_all.noalias() = r_pred * a_all;
  }
  auto a(size_t k) const { return a_all.middleCols(static_cast<Eigen::Index>(k) * t, t); }
  auto b(size_t k) const { return b_all.middleCols(static_cast<Eigen::Index>(k) * t, t); }
};

CMatrix innovation_inverse(const CMatrix& p, const CMatrix& a) {
  const Eigen::Index t = p.cols();
  const CMatrix s = CMatrix::Identity(t, t) + p.adjoint() * a;
  return hermitian_part(solve_hpd(s, CMatrix::Identity(t, t)));
}

// Traces and quadratic forms of R_p = A M A^H and R_c = R_pred - R_p
// evaluated through T x T products only.
struct PosteriorMoments {
  double tr_rp = 0.0;
  double tr_rp2 = 0.0;
  double tr_rc_rp = 0.0;
  double tr_rc_rp2 = 0.0;
  double m_rp_m = 0.0;
  double m_rc_m = 0.0;
  double m_rc_rp_m = 0.0;
  double m_norm2 = 0.0;
};

PosteriorMoments posterior_moments(const CMatrix& p, const CMatrix& a, const CMatrix& b, const CVector& m,
                                   double m_rpred_m) {
  const CMatrix s_inv = innovation_inverse(p, a);
  const CMatrix g = a.adjoint() * a;
  const CMatrix h = a.adjoint() * b;
  const CMatrix mg = s_inv * g;
  const CMatrix mg2 = mg * mg;
  const CVector u = a.adjoint() * m;
  const CVector v = b.adjoint() * m;
  const CVector mu = s_inv * u;

  PosteriorMoments out;
  out.tr_rp = mg.trace().real();
  out.tr_rp2 = mg2.trace().real();
  const double tr_rp3 = (mg2 * mg).trace().real();
  out.tr_rc_rp = (s_inv * h).trace().real() - out.tr_rp2;
  out.tr_rc_rp2 = (mg * s_inv * h).trace().real() - tr_rp3;
  out.m_rp_m = u.dot(mu).real();
  out.m_rc_m = m_rpred_m - out.m_rp_m;
  out.m_rc_rp_m = v.dot(mu).real() - mu.dot(g * mu).real();
  out.m_norm2 = m.squaredNorm();
  return out;
}

SnrObjective objective_from_moments(const PosteriorMoments& mom, double trace_r_pred, MomentConvention convention) {
  SnrObjective out;
  const double e_alpha2 = mom.m_norm2 + mom.tr_rp;
  if (!(e_alpha2 > 1e-12 * std::max(1.0, trace_r_pred))) {
    out.value = mom.tr_rp;
    out.degenerate = true;
    return out;
  }
  const double e_alpha1 = mom.m_rc_m + mom.tr_rc_rp;
  double var2 = 0.0;
  double cov12 = 0.0;
  switch (convention) {
    case MomentConvention::kPrinted:
      var2 = 4.0 * mom.m_rp_m + 2.0 * mom.tr_rp2;
      cov12 = 4.0 * mom.m_rc_rp_m + 2.0 * mom.tr_rc_rp2;
      break;
    case MomentConvention::kPrintedSquaredTrace:
      var2 = 4.0 * mom.m_rp_m + 2.0 * mom.tr_rp * mom.tr_rp;
      cov12 = 4.0 * mom.m_rc_rp_m + 2.0 * mom.tr_rc_rp2;
      break;
    case MomentConvention::kCircularGaussian:
      var2 = 2.0 * mom.m_rp_m + mom.tr_rp2;
      cov12 = 2.0 * mom.m_rc_rp_m + mom.tr_rc_rp2;
      break;
  }
  // (E1/E2)(1 - Cov/(E1 E2) + Var/E2^2), expanded so E1 = 0 is harmless.
  const double e2 = e_alpha2 * e_alpha2;
  out.q = e_alpha1 / e_alpha2 - cov12 / e2 + e_alpha1 * var2 / (e2 * e_alpha2);
  out.value = mom.tr_rp + mom.m_norm2 + out.q;
  return out;
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  for (const auto& entry : kStrategyNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  for (const auto& entry : kStrategyNames) {
    if (entry.name == name) return entry.kind;
  }
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected ol-ss, ol-mem, cl-mem-mse, cl-mem-snr, cl-ss-full or cl-mem-full)");
}

bool uses_memory(StrategyKind kind) {
  return kind != StrategyKind::kOpenLoopSingleShot && kind != StrategyKind::kClosedLoopSingleShotFull;
}

bool uses_codebook(StrategyKind kind) {
  return kind == StrategyKind::kOpenLoopSingleShot || kind == StrategyKind::kOpenLoopMemory ||
         kind == StrategyKind::kClosedLoopMemoryMse || kind == StrategyKind::kClosedLoopMemorySnr;
}

std::string_view to_string(MomentConvention convention) {
  switch (convention) {
    case MomentConvention::kPrinted:
      return "printed";
    case MomentConvention::kPrintedSquaredTrace:
      return "printed-squared-trace";
    case MomentConvention::kCircularGaussian:
      return "circular-gaussian";
  }
  return "unknown";
}

MomentConvention parse_moment_convention(std::string_view name) {
  for (MomentConvention c : {MomentConvention::kPrinted, MomentConvention::kPrintedSquaredTrace,
                             MomentConvention::kCircularGaussian}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("unknown moment convention '" + std::string(name) +
                    "' (expected printed, printed-squared-trace or circular-gaussian)");
}

StrategyDecision select_round_robin(const TrainingCodebook& codebook, size_t block_index,
                                    std::span<const size_t> order) {
  if (codebook.entries.empty()) throw ConfigError("select_round_robin: empty codebook");
  if (!order.empty() && order.size() != codebook.size()) {
    throw DimensionError("select_round_robin: permutation size does not match codebook");
  }
  const size_t slot = block_index % codebook.size();
  const size_t index = order.empty() ? slot : order[slot];
  return {codebook.entries.at(index), 0, index};
}

StrategyDecision select_min_mse(const TrainingCodebook& codebook, const KalmanState& kalman) {
  require_codebook_fits(codebook, kalman);
  const CandidateProducts prod(codebook.entries, kalman.r_pred, false);
  size_t best = 0;
  double best_value = 0.0;
  for (size_t k = 0; k < codebook.size(); ++k) {
    const CMatrix a = prod.a(k);
    const CMatrix s_inv = innovation_inverse(codebook.entries[k], a);
    const double explained = (s_inv * (a.adjoint() * a)).trace().real();
    if (k == 0 || beats(explained, best_value)) {
      best = k;
      best_value = explained;
    }
  }
  return {codebook.entries[best], codebook.bits, best};
}

SnrObjective snr_objective(const CMatrix& p, const KalmanState& kalman, MomentConvention convention) {
  if (p.rows() != kalman.r_pred.rows() || p.cols() < 1 || p.cols() > p.rows()) {
    throw DimensionError("snr_objective: training matrix does not match state");
  }
  const CMatrix a = kalman.r_pred * p;
  const CMatrix b = kalman.r_pred * a;
  const double m_rpred_m = kalman.h_pred.dot(kalman.r_pred * kalman.h_pred).real();
  return objective_from_moments(posterior_moments(p, a, b, kalman.h_pred, m_rpred_m), real_trace(kalman.r_pred),
                                convention);
}

StrategyDecision select_max_snr(const TrainingCodebook& codebook, const KalmanState& kalman,
                                MomentConvention convention) {
  require_codebook_fits(codebook, kalman);
  const CandidateProducts prod(codebook.entries, kalman.r_pred, true);
  const double m_rpred_m = kalman.h_pred.dot(kalman.r_pred * kalman.h_pred).real();
  const double trace_r_pred = real_trace(kalman.r_pred);
  size_t best = 0;
  double best_value = 0.0;
  for (size_t k = 0; k < codebook.size(); ++k) {
    const PosteriorMoments mom = posterior_moments(codebook.entries[k], prod.a(k), prod.b(k), kalman.h_pred, m_rpred_m);
    const double value = objective_from_moments(mom, trace_r_pred, convention).value;
    if (k == 0 || beats(value, best_value)) {
      best = k;
      best_value = value;
    }
  }
  return {codebook.entries[best], codebook.bits, best};
}

StrategyDecision select_full_feedback(const KalmanState& kalman, int t_len, double rho) {
  return {x_opt_full_feedback(kalman.r_pred, t_len, rho), kUnboundedFeedback, std::nullopt};
}

Beamformer beamformer(const CVector& h_hat) {
  if (h_hat.size() == 0) throw DimensionError("beamformer: empty estimate");
  const double norm = h_hat.norm();
  if (norm < 1e-12) {
    CVector e1 = CVector::Zero(h_hat.size());
    e1(0) = 1.0;
    return {std::move(e1), true};
  }
  return {h_hat / norm, false};
}

double realized_snr(const CVector& h, const CVector& w) {
  if (h.size() != w.size()) throw DimensionError("realized_snr: length mismatch");
  return std::norm(w.dot(h));
}

StrategyDecision choose_training(const StrategyContext& ctx) {
  const auto need_codebook = [&]() -> const TrainingCodebook& {
    if (ctx.codebook == nullptr) throw ConfigError(std::string(to_string(ctx.kind)) + " needs a codebook");
    return *ctx.codebook;
  };
  const auto need_kalman = [&]() -> const KalmanState& {
    if (ctx.kalman == nullptr) throw ConfigError(std::string(to_string(ctx.kind)) + " needs a Kalman state");
    return *ctx.kalman;
  };

  switch (ctx.kind) {
    case StrategyKind::kOpenLoopSingleShot:
    case StrategyKind::kOpenLoopMemory:
      return select_round_robin(need_codebook(), ctx.block_index, ctx.order);
    case StrategyKind::kClosedLoopMemoryMse:
      return select_min_mse(need_codebook(), need_kalman());
    case StrategyKind::kClosedLoopMemorySnr:
      return select_max_snr(need_codebook(), need_kalman(), ctx.convention);
    case StrategyKind::kClosedLoopSingleShotFull:
      if (ctx.single_shot_optimal != nullptr) return {*ctx.single_shot_optimal, kUnboundedFeedback, std::nullopt};
      return select_full_feedback(need_kalman(), ctx.t_len, ctx.rho);
    case StrategyKind::kClosedLoopMemoryFull:
      return select_full_feedback(need_kalman(), ctx.t_len, ctx.rho);
  }
  throw ConfigError("choose_training: unknown strategy");
}

}  // namespace fddtrain
