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

// Reference computations written directly from the defining formulas, with
// no shortcuts shared with the library. Dense and slow on purpose.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// J0 by its power series (converges everywhere; accurate for |x| < ~20).
inline double bessel_j0_series(double x) {
  const double q = -x * x / 4.0;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline double jakes(double v_kmh, double fc, double tau) {
  return bessel_j0_series(2.0 * std::numbers::pi * (v_kmh / 3.6) * fc / 3e8 * tau);
}

inline CMatrix exp_corr(int n, double a) {
  CMatrix r(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) r(j, k) = std::pow(a, std::abs(j - k));
  }
  return r;
}

/// Eigenvalues, descending.
inline std::vector<double> eigenvalues_desc(const CMatrix& r) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// 1 - (1/N) sum_{t<=T} rho l_t^2 / (rho l_t + 1) for trace(R) = N.
inline double closed_form_mse(const CMatrix& r, int t_len, double rho) {
  const auto l = eigenvalues_desc(r);
  double s = 0.0;
  for (int t = 0; t < t_len; ++t) s += rho * l[t] * l[t] / (rho * l[t] + 1.0);
  return (r.trace().real() - s) / static_cast<double>(r.rows());
}

/// Dense MMSE posterior covariance R - R X (I + X^H R X)^{-1} X^H R.
inline CMatrix posterior_cov(const CMatrix& r, const CMatrix& x) {
  const CMatrix s = CMatrix::Identity(x.cols(), x.cols()) + x.adjoint() * r * x;
  return r - r * x * s.inverse() * x.adjoint() * r;
}

/// Per-block normalized MSE of a Kalman filter that always trains on the
/// T dominant directions of its prediction, simulated in the eigenbasis of R
/// with plain loops.
inline std::vector<double> full_feedback_mse(const CMatrix& r, double eta, int t_len, double rho, int blocks) {
  const auto lambda = eigenvalues_desc(r);
  const size_t n = lambda.size();
  std::vector<double> mu = lambda;
  std::vector<double> out;
  for (int i = 0; i < blocks; ++i) {
    std::vector<size_t> idx(n);
    for (size_t k = 0; k < n; ++k) idx[k] = k;
    std::stable_sort(idx.begin(), idx.end(), [&](size_t p, size_t q) { return mu[p] > mu[q]; });
    for (int t = 0; t < t_len; ++t) mu[idx[t]] = mu[idx[t]] / (rho * mu[idx[t]] + 1.0);
    double tr = 0.0;
    for (double m : mu) tr += m;
    out.push_back(tr / static_cast<double>(n));
    for (size_t k = 0; k < n; ++k) mu[k] = eta * eta * mu[k] + (1.0 - eta * eta) * lambda[k];
  }
  return out;
}

/// Delta-method ratio term straight from dense R_p and R_c. quad_c scales the
/// quadratic-form parts of Var and Cov, trace_c their trace parts.
inline double q_dense(const CVector& m, const CMatrix& r_pred, const CMatrix& x, double quad_c, double trace_c) {
  const CMatrix r_c = posterior_cov(r_pred, x);
  const CMatrix r_p = r_pred - r_c;
  const double e1 = m.dot(r_c * m).real() + (r_c * r_p).trace().real();
  const double e2 = m.squaredNorm() + r_p.trace().real();
  const double var = quad_c * m.dot(r_p * m).real() + trace_c * (r_p * r_p).trace().real();
  const double cov = quad_c * m.dot(r_c * r_p * m).real() + trace_c * (r_c * r_p * r_p).trace().real();
  return e1 / e2 * (1.0 - cov / (e1 * e2) + var / (e2 * e2));
}

/// Independent Gaussian source, not the library's stream type.
class Gauss {
 public:
  explicit Gauss(std::uint64_t seed) : eng_(seed) {}
  double normal() { return dist_(eng_); }
  double uniform() { return uni_(eng_); }
  Complex cn() { return {normal() * std::sqrt(0.5), normal() * std::sqrt(0.5)}; }
  CVector cn_vector(int n) {
    CVector v(n);
    for (int k = 0; k < n; ++k) v(k) = cn();
    return v;
  }
  CMatrix cn_matrix(int r, int c) {
    CMatrix m(r, c);
    for (int j = 0; j < c; ++j) {
      for (int i = 0; i < r; ++i) m(i, j) = cn();
    }
    return m;
  }

 private:
  std::mt19937 eng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

/// Orthonormal columns by modified Gram-Schmidt on a Gaussian matrix.
inline CMatrix random_isometry(int n, int t, Gauss& g) {
  CMatrix q = g.cn_matrix(n, t);
  for (int j = 0; j < t; ++j) {
    for (int k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j) /= q.col(j).norm();
  }
  return q;
}

/// (1/sqrt 2) ||P_x - P_y||_F with projectors built from explicit inverses.
inline double chordal(const CMatrix& x, const CMatrix& y) {
  const CMatrix px = x * (x.adjoint() * x).inverse() * x.adjoint();
  const CMatrix py = y * (y.adjoint() * y).inverse() * y.adjoint();
  return (px - py).norm() / std::sqrt(2.0);
}

inline double min_chordal(const std::vector<CMatrix>& entries) {
  double best = 1e300;
  for (size_t i = 0; i < entries.size(); ++i) {
    for (size_t j = i + 1; j < entries.size(); ++j) best = std::min(best, chordal(entries[i], entries[j]));
  }
  return best;
}

}  // namespace oracle
