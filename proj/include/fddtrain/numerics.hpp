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

#include <complex>

#include <Eigen/Dense>

namespace fddtrain {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Numerical thresholds shared by the dense kernels below.
struct NumericTolerances {
  double hermitian = 1e-12;      // max |m - m^H| accepted before symmetrizing
  double psd_clamp = 1e-10;      // negative eigenvalues above -psd_clamp are zeroed
  double max_condition = 1e12;   // solve_hpd refuses worse-conditioned systems
  double eigen_cluster = 1e-10;  // relative gap below which eigenvalues tie
};

/// Eigenpairs of a Hermitian matrix, largest eigenvalue first.
///
/// Each eigenvector is canonicalized so that its largest-magnitude entry is
/// real and positive. Columns whose eigenvalues tie (within the cluster
/// tolerance) are ordered by the row index of that pivot entry, which makes
/// "take the first T columns" reproducible.
struct EigenDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;
};

/// (m + m^H) / 2
CMatrix hermitian_part(const CMatrix& m);

EigenDecomposition hermitian_eig(const CMatrix& m, const NumericTolerances& tol = {});

/// Principal square root S of a Hermitian PSD matrix (S Hermitian, S*S = m).
CMatrix psd_sqrt(const CMatrix& m, const NumericTolerances& tol = {});

/// Solves a * x = b for Hermitian positive definite a via Cholesky.
CMatrix solve_hpd(const CMatrix& a, const CMatrix& b, const NumericTolerances& tol = {});

/// Zeroth-order Bessel function of the first kind.
double bessel_j0(double x);

double real_trace(const CMatrix& m);

/// ||a - b||_F / max(||b||_F, tiny)
double relative_frobenius_error(const CMatrix& a, const CMatrix& b);

}  // namespace fddtrain
