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

#include <cmath>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "fddtrain/channel.hpp"
#include "fddtrain/errors.hpp"
#include "fddtrain/estimation.hpp"
#include "fddtrain/random.hpp"

using namespace fddtrain;

namespace {

struct Case {
  int n;
  int t;
  double a;
  double rho;
  double eta;
};

// Hand-rolled generator over the valid parameter ranges.
Case draw_case(oracle::Gauss& g, int max_n = 24) {
  Case c;
  c.n = 1 + static_cast<int>(g.uniform() * max_n);
  c.t = 1 + static_cast<int>(g.uniform() * c.n);
  c.a = 0.95 * g.uniform();
  c.rho = std::exp(std::log(0.01) + g.uniform() * std::log(1e6));
  c.eta = g.uniform();
  return c;
}

}  // namespace

TEST_CASE("single-shot eigen-aligned MSE matches the closed form") {
  oracle::Gauss g(101);
  for (int k = 0; k < 60; ++k) {
    const Case c = draw_case(g);
    const CMatrix r = exponential_correlation(c.n, c.a);
    const CMatrix x = x_ss_opt(r, c.t, c.rho);
    CHECK((x.adjoint() * x - c.rho * CMatrix::Identity(c.t, c.t)).norm() < 1e-9 * c.rho * c.t);
    const double expected = oracle::closed_form_mse(oracle::exp_corr(c.n, c.a), c.t, c.rho);
    CHECK(mse_of_training(x, r) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(mse_single_shot_optimal(r, c.t, c.rho) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("eigen-aligned training beats random unitary training") {
  oracle::Gauss g(102);
  for (int k = 0; k < 40; ++k) {
    const Case c = draw_case(g);
    const CMatrix r = exponential_correlation(c.n, c.a);
    const CMatrix x = std::sqrt(c.rho) * oracle::random_isometry(c.n, c.t, g);
    CHECK(mse_single_shot_optimal(r, c.t, c.rho) <= mse_of_training(x, r) + 1e-12);
  }
}

TEST_CASE("posterior factor agrees with the dense posterior") {
  oracle::Gauss g(103);
  for (int k = 0; k < 30; ++k) {
    const Case c = draw_case(g);
    const CMatrix b = g.cn_matrix(c.n, c.n);
    const CMatrix r_pred = b * b.adjoint() / c.n + 0.1 * CMatrix::Identity(c.n, c.n);
    const CMatrix x = std::sqrt(c.rho) * oracle::random_isometry(c.n, c.t, g);
    const PosteriorFactor f = posterior_factor(r_pred, x);
    const CMatrix dense = r_pred - oracle::posterior_cov(r_pred, x);
    CHECK(relative_frobenius_error(f.a * f.s_inv * f.a.adjoint(), dense) < 1e-8);
    CHECK(relative_frobenius_error(posterior_gain_matrix(r_pred, x), dense) < 1e-8);
  }
}

TEST_CASE("Kalman correction of the prior equals single-shot MMSE") {
  oracle::Gauss g(104);
  RandomStream rng(104);
  for (int k = 0; k < 20; ++k) {
    const Case c = draw_case(g, 16);
    const CMatrix r = exponential_correlation(c.n, c.a);
    const CMatrix x = std::sqrt(c.rho) * oracle::random_isometry(c.n, c.t, g);
    const CVector h = g.cn_vector(c.n);
    const TrainingObservation obs = observe(x, h, rng);
    const KalmanState s = kalman_correct(KalmanState::initial(r), obs);
    const MmseEstimate e = single_shot_mmse(x, obs.y, r);
    CHECK((s.h_corr - e.h_hat).norm() <= 1e-9 * (1.0 + e.h_hat.norm()));
    CHECK(relative_frobenius_error(s.r_corr, oracle::posterior_cov(r, x)) < 1e-9);
  }
}

TEST_CASE("Kalman prediction") {
  const CMatrix r = exponential_correlation(5, 0.6);
  KalmanState s = KalmanState::initial(r);
  s.h_corr = CVector::Constant(5, Complex(1.0, -1.0));
  s.r_corr = 0.25 * r;
  const KalmanState p = kalman_predict(s, 0.8, r);
  CHECK(p.block_index == s.block_index + 1);
  CHECK((p.h_pred - 0.8 * s.h_corr).norm() < 1e-14);
  CHECK(relative_frobenius_error(p.r_pred, 0.64 * 0.25 * r + 0.36 * r) < 1e-14);
}

TEST_CASE("full-feedback tracking matches the eigenvalue recursion") {
  oracle::Gauss g(105);
  for (int k = 0; k < 30; ++k) {
    const Case c = draw_case(g, 16);
    const CMatrix r = exponential_correlation(c.n, c.a);
    const auto closed = mse_lower_bound_closed_loop(r, c.eta, c.t, c.rho, 9);
    const auto reference = oracle::full_feedback_mse(oracle::exp_corr(c.n, c.a), c.eta, c.t, c.rho, 10);
    REQUIRE(closed.size() == 10);
    KalmanState s = KalmanState::initial(r);
    for (int i = 0; i < 10; ++i) {
      if (i > 0) s = kalman_predict(s, c.eta, r);
      s = kalman_correct(s, observe_noiseless(x_opt_full_feedback(s.r_pred, c.t, c.rho), CVector::Zero(c.n)));
      CHECK(closed[static_cast<size_t>(i)] == doctest::Approx(reference[static_cast<size_t>(i)]).epsilon(1e-8));
      CHECK(std::abs(real_trace(s.r_corr) / c.n - closed[static_cast<size_t>(i)]) < 1e-8);
    }
  }
}

TEST_CASE("MSE decreases in T and rho") {
  oracle::Gauss g(106);
  for (int k = 0; k < 40; ++k) {
    const Case c = draw_case(g);
    const CMatrix r = exponential_correlation(c.n, c.a);
    if (c.t < c.n) CHECK(mse_single_shot_optimal(r, c.t + 1, c.rho) < mse_single_shot_optimal(r, c.t, c.rho));
    CHECK(mse_single_shot_optimal(r, c.t, 2.0 * c.rho) < mse_single_shot_optimal(r, c.t, c.rho));
  }
}

TEST_CASE("SNR bounds") {
  oracle::Gauss g(107);
  for (int k = 0; k < 40; ++k) {
    const Case c = draw_case(g, 64);
    const CMatrix r = exponential_correlation(c.n, c.a);
    const double upper = snr_upper_bound_ss(r, c.t, c.rho);
    const auto l = oracle::eigenvalues_desc(oracle::exp_corr(c.n, c.a));
    double energy = 0.0;
    for (int t = 0; t < c.t; ++t) energy += c.rho * l[t] * l[t] / (c.rho * l[t] + 1.0);
    CHECK(upper == doctest::Approx(energy + l[0]).epsilon(1e-10));
    CHECK(upper <= snr_ceiling_bound_exp(c.t, c.a) + 1e-9);
  }
  CHECK(snr_ceiling_bound_exp(4, 0.5) == doctest::Approx(15.0));
  CHECK_THROWS_AS(snr_ceiling_bound_exp(4, 1.0), DomainError);
}

TEST_CASE("training preconditions") {
  CMatrix x = CMatrix::Zero(4, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 2.0;
  CHECK_THROWS_AS(require_unitary_training(x), PreconditionError);
  x(1, 1) = 1.0;
  CHECK_NOTHROW(require_unitary_training(x));
  CHECK(training_power(3.0 * x) == doctest::Approx(9.0));
  CHECK_THROWS_AS(x_ss_opt(exponential_correlation(4, 0.5), 5, 1.0), DomainError);
  CHECK_THROWS_AS(mse_lower_bound_closed_loop(exponential_correlation(4, 0.5), 1.2, 1, 1.0, 3), DomainError);
}
