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

#include <vector>

#include "fddtrain/numerics.hpp"
#include "fddtrain/random.hpp"

namespace fddtrain {

/// Sequential MMSE (Kalman) estimate of the channel.
///
/// `h_pred`/`r_pred` describe the channel of block `block_index` given the
/// pilots of earlier blocks; `h_corr`/`r_corr` additionally use the pilots of
/// block `block_index` once `kalman_correct` has run.
struct KalmanState {
  CVector h_pred;
  CVector h_corr;
  CMatrix r_pred;
  CMatrix r_corr;
  int block_index = 0;

  /// Zero mean and prior covariance r for block 0.
  static KalmanState initial(const CMatrix& r);
};

/// Received pilots y = X^H h + n of one block.
struct TrainingObservation {
  CMatrix x;  // N_t x T, X^H X = rho I
  CVector y;  // length T
};

struct MmseEstimate {
  CVector h_hat;
  CMatrix r_hat;  // covariance of h_hat
};

/// Low-rank pieces of the posterior update: with A = R X and
/// S = I + X^H R X, the gain is A S^{-1} and the explained covariance is
/// A S^{-1} A^H. Keeps every N x N product out of selection loops.
struct PosteriorFactor {
  CMatrix a;      // N_t x T
  CMatrix s_inv;  // T x T, Hermitian
};

PosteriorFactor posterior_factor(const CMatrix& r_pred, const CMatrix& x);

/// Per-pilot power rho = ||X||_F^2 / T.
double training_power(const CMatrix& x);

/// Throws PreconditionError unless ||X^H X - rho I||_F <= rel_tol * rho * T.
void require_unitary_training(const CMatrix& x, double rel_tol = 1e-9);

TrainingObservation observe(const CMatrix& x, const CVector& h, RandomStream& rng);
/// Same as `observe` with the noise term set to zero (test hook).
TrainingObservation observe_noiseless(const CMatrix& x, const CVector& h);

/// h_hat = R X (I + X^H R X)^{-1} y using only the current block's pilots.
MmseEstimate single_shot_mmse(const CMatrix& x, const CVector& y, const CMatrix& r);

/// (1/N_t) tr(R - R X (I + X^H R X)^{-1} X^H R)
double mse_of_training(const CMatrix& x, const CMatrix& r);

/// sum_{t<=T} rho l_t^2 / (rho l_t + 1) over the T largest entries of
/// `eigenvalues` (which must be sorted non-increasing). Schur-convex in l.
double trained_energy(const RVector& eigenvalues, int t_len, double rho);

/// Closed-form MSE of eigen-aligned single-shot training:
/// (tr R - trained_energy) / N_t, i.e. 1 - trained_energy / N_t when tr R = N_t.
double mse_single_shot_optimal(const CMatrix& r, int t_len, double rho);

/// sqrt(rho) times the T dominant eigenvectors of r.
CMatrix x_ss_opt(const CMatrix& r, int t_len, double rho);

KalmanState kalman_predict(const KalmanState& state, double eta, const CMatrix& r);
KalmanState kalman_correct(const KalmanState& state, const TrainingObservation& obs);

/// Covariance explained by training X from prediction r_pred:
/// R_p = r_pred X (I + X^H r_pred X)^{-1} X^H r_pred.
CMatrix posterior_gain_matrix(const CMatrix& r_pred, const CMatrix& x);

/// Upper bound on the beamforming SNR of eigen-aligned single-shot training:
/// trained_energy + lambda_1.
double snr_upper_bound_ss(const CMatrix& r, int t_len, double rho);

/// (T + 1)(1 + a)/(1 - a): N_t-free ceiling for the exponential model.
double snr_ceiling_bound_exp(int t_len, double a);

/// MSE of blocks 0..i_max when every block trains along the T dominant
/// eigen-directions of its prediction matrix, evaluated on the eigenvalues
/// alone (no matrix recursion).
std::vector<double> mse_lower_bound_closed_loop(const CMatrix& r, double eta, int t_len, double rho,
                                                int i_max);

/// sqrt(rho) times the T dominant eigenvectors of the prediction matrix.
CMatrix x_opt_full_feedback(const CMatrix& r_pred, int t_len, double rho);

}  // namespace fddtrain
