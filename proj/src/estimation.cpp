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

#include "fddtrain/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fddtrain/errors.hpp"

namespace fddtrain {

namespace {

void require_training_shape(const CMatrix& x, Eigen::Index n, const char* what) {
  if (x.rows() != n || x.cols() < 1 || x.cols() > n) {
    throw DimensionError(std::string(what) + ": training matrix is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", expected " + std::to_string(n) + "xT with 1<=T<=" +
                         std::to_string(n));
  }
}

void require_dominant_args(const CMatrix& r, int t_len, double rho, const char* what) {
  if (t_len < 1 || t_len > r.rows()) {
    throw DomainError(std::string(what) + ": t_len must lie in [1, " + std::to_string(r.rows()) + "], got " +
                      std::to_string(t_len));
  }
  if (!(rho >= 0.0)) throw DomainError(std::string(what) + ": rho must be >= 0");
}

CMatrix dominant_directions(const CMatrix& r, int t_len, double rho) {
  return std::sqrt(rho) * hermitian_eig(r).eigenvectors.leftCols(t_len);
}

double explained(double lambda, double rho) { return rho * lambda * lambda / (rho * lambda + 1.0); }

}  // namespace

KalmanState KalmanState::initial(const CMatrix& r) {
  const Eigen::Index n = r.rows();
  return {CVector::Zero(n), CVector::Zero(n), r, r, 0};
}

PosteriorFactor posterior_factor(const CMatrix& r_pred, const CMatrix& x) {
  require_training_shape(x, r_pred.rows(), "posterior_factor");
  PosteriorFactor f;
  f.a = r_pred * x;
  const Eigen::Index t = x.cols();
  const CMatrix innovation = CMatrix::Identity(t, t) + x.adjoint() * f.a;
  f.s_inv = hermitian_part(solve_hpd(innovation, CMatrix::Identity(t, t)));
  return f;
}

double training_power(const CMatrix& x) {
  if (x.cols() == 0) throw DimensionError("training_power: empty training matrix");
  return x.squaredNorm() / static_cast<double>(x.cols());
}

void require_unitary_training(const CMatrix& x, double rel_tol) {
  const double rho = training_power(x);
  const Eigen::Index t = x.cols();
  const double err = (x.adjoint() * x - rho * CMatrix::Identity(t, t)).norm();
  if (err > rel_tol * rho * static_cast<double>(t)) {
    throw PreconditionError("training matrix is not unitary: ||X^H X - rho I||_F = " + std::to_string(err));
  }
}

TrainingObservation observe_noiseless(const CMatrix& x, const CVector& h) {
  require_training_shape(x, h.size(), "observe");
  require_unitary_training(x);
  return {x, x.adjoint() * h};
}

TrainingObservation observe(const CMatrix& x, const CVector& h, RandomStream& rng) {
  TrainingObservation obs = observe_noiseless(x, h);
  obs.y += rng.complex_normal_vector(x.cols());
  return obs;
}

MmseEstimate single_shot_mmse(const CMatrix& x, const CVector& y, const CMatrix& r) {
  if (r.rows() != r.cols()) throw DimensionError("single_shot_mmse: covariance must be square");
  require_training_shape(x, r.rows(), "single_shot_mmse");
  if (y.size() != x.cols()) throw DimensionError("single_shot_mmse: y length must equal T");
  const PosteriorFactor f = posterior_factor(r, x);
  MmseEstimate est;
  est.h_hat = f.a * (f.s_inv * y);
  est.r_hat = hermitian_part(f.a * f.s_inv * f.a.adjoint());
  return est;
}

double mse_of_training(const CMatrix& x, const CMatrix& r) {
  const PosteriorFactor f = posterior_factor(r, x);
  const double explained_trace = (f.s_inv * (f.a.adjoint() * f.a)).trace().real();
  return (real_trace(r) - explained_trace) / static_cast<double>(r.rows());
}

double trained_energy(const RVector& eigenvalues, int t_len, double rho) {
  double total = 0.0;
  for (int t = 0; t < t_len && t < eigenvalues.size(); ++t) total += explained(eigenvalues(t), rho);
  return total;
}

double mse_single_shot_optimal(const CMatrix& r, int t_len, double rho) {
  require_dominant_args(r, t_len, rho, "mse_single_shot_optimal");
  const RVector lambda = hermitian_eig(r).eigenvalues;
  return (lambda.sum() - trained_energy(lambda, t_len, rho)) / static_cast<double>(r.rows());
}

CMatrix x_ss_opt(const CMatrix& r, int t_len, double rho) {
  require_dominant_args(r, t_len, rho, "x_ss_opt");
  return dominant_directions(r, t_len, rho);
}

KalmanState kalman_predict(const KalmanState& state, double eta, const CMatrix& r) {
  if (state.r_corr.rows() != r.rows()) throw DimensionError("kalman_predict: state and R sizes differ");
  KalmanState next = state;
  next.h_pred = eta * state.h_corr;
  next.r_pred = hermitian_part(eta * eta * state.r_corr + (1.0 - eta * eta) * r);
  next.block_index = state.block_index + 1;
  return next;
}

KalmanState kalman_correct(const KalmanState& state, const TrainingObservation& obs) {
  require_training_shape(obs.x, state.r_pred.rows(), "kalman_correct");
  if (obs.y.size() != obs.x.cols()) throw DimensionError("kalman_correct: y length must equal T");
  const PosteriorFactor f = posterior_factor(state.r_pred, obs.x);
  const CMatrix gain = f.a * f.s_inv;
  KalmanState next = state;
  next.h_corr = state.h_pred + gain * (obs.y - obs.x.adjoint() * state.h_pred);
  next.r_corr = hermitian_part(state.r_pred - gain * f.a.adjoint());
  return next;
}

CMatrix posterior_gain_matrix(const CMatrix& r_pred, const CMatrix& x) {
  const PosteriorFactor f = posterior_factor(r_pred, x);
  return hermitian_part(f.a * f.s_inv * f.a.adjoint());
}

double snr_upper_bound_ss(const CMatrix& r, int t_len, double rho) {
  require_dominant_args(r, t_len, rho, "snr_upper_bound_ss");
  const RVector lambda = hermitian_eig(r).eigenvalues;
  return trained_energy(lambda, t_len, rho) + lambda(0);
}

double snr_ceiling_bound_exp(int t_len, double a) {
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("snr_ceiling_bound_exp: a must lie in [0, 1)");
  if (t_len < 1) throw DomainError("snr_ceiling_bound_exp: t_len must be >= 1");
  return (t_len + 1) * (1.0 + a) / (1.0 - a);
}

std::vector<double> mse_lower_bound_closed_loop(const CMatrix& r, double eta, int t_len, double rho,
                                                int i_max) {
  require_dominant_args(r, t_len, rho, "mse_lower_bound_closed_loop");
  if (i_max < 0) throw DomainError("mse_lower_bound_closed_loop: i_max must be >= 0");
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("mse_lower_bound_closed_loop: eta must lie in [0, 1]");

  // R_{i|i-1} stays diagonal in the eigenbasis of R; track its diagonal.
  const RVector lambda = hermitian_eig(r).eigenvalues;
  const auto n = static_cast<size_t>(lambda.size());
  std::vector<double> pred(lambda.data(), lambda.data() + lambda.size());
  std::vector<size_t> order(n);
  const double eta2 = eta * eta;

  std::vector<double> mse;
  mse.reserve(static_cast<size_t>(i_max) + 1);
  double discounted = 0.0;  // sum_k eta^{2(i-k)} * trained energy of block k
  for (int i = 0; i <= i_max; ++i) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return pred[a] > pred[b]; });
    std::vector<double> corr = pred;
    double energy = 0.0;
    for (int t = 0; t < t_len; ++t) {
      const size_t j = order[static_cast<size_t>(t)];
      energy += explained(pred[j], rho);
      corr[j] = pred[j] / (rho * pred[j] + 1.0);
    }
    discounted = eta2 * discounted + energy;
    mse.push_back((lambda.sum() - discounted) / static_cast<double>(n));
    for (size_t j = 0; j < n; ++j) pred[j] = eta2 * corr[j] + (1.0 - eta2) * lambda(static_cast<Eigen::Index>(j));
  }
  return mse;
}

CMatrix x_opt_full_feedback(const CMatrix& r_pred, int t_len, double rho) {
  require_dominant_args(r_pred, t_len, rho, "x_opt_full_feedback");
  return dominant_directions(r_pred, t_len, rho);
}

}  // namespace fddtrain
