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

#include "fddtrain/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "fddtrain/errors.hpp"

namespace fddtrain {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// Row index of the entry with the largest magnitude; the lowest index wins
// among entries that are equal up to rounding.
Eigen::Index pivot_row(const Eigen::Ref<const CVector>& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) >= peak * (1.0 - 1e-9)) return k;
  }
  return 0;
}

}  // namespace

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

EigenDecomposition hermitian_eig(const CMatrix& m, const NumericTolerances& tol) {
  require_square(m, "hermitian_eig");
  const Eigen::Index n = m.rows();

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw SingularityError("hermitian_eig: eigensolver did not converge");
  }
  const RVector& ascending = solver.eigenvalues();
  const CMatrix& vectors = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ascending(a) > ascending(b); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  std::vector<Eigen::Index> pivots(static_cast<size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<size_t>(k)];
    CVector v = vectors.col(src);
    const Eigen::Index p = pivot_row(v);
    const Complex phase = std::conj(v(p)) / std::abs(v(p));
    v *= phase;
    v(p) = Complex(v(p).real(), 0.0);
    out.eigenvalues(k) = ascending(src);
    out.eigenvectors.col(k) = v;
    pivots[static_cast<size_t>(k)] = p;
  }

  // Reorder each cluster of tied eigenvalues by pivot row.
  const double scale = std::max(1.0, std::abs(out.eigenvalues(0)));
  Eigen::Index begin = 0;
  while (begin < n) {
    Eigen::Index end = begin + 1;
    while (end < n && out.eigenvalues(end - 1) - out.eigenvalues(end) <= tol.eigen_cluster * scale) {
      ++end;
    }
    if (end - begin > 1) {
      std::vector<Eigen::Index> idx(static_cast<size_t>(end - begin));
      std::iota(idx.begin(), idx.end(), begin);
      std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return pivots[static_cast<size_t>(a)] < pivots[static_cast<size_t>(b)];
      });
      const CMatrix block = out.eigenvectors.middleCols(begin, end - begin);
      const RVector vals = out.eigenvalues.segment(begin, end - begin);
      for (Eigen::Index k = 0; k < end - begin; ++k) {
        out.eigenvectors.col(begin + k) = block.col(idx[static_cast<size_t>(k)] - begin);
        out.eigenvalues(begin + k) = vals(idx[static_cast<size_t>(k)] - begin);
      }
    }
    begin = end;
  }
  return out;
}

CMatrix psd_sqrt(const CMatrix& m, const NumericTolerances& tol) {
  const EigenDecomposition eig = hermitian_eig(m, tol);
  const double scale = std::max(1.0, std::abs(eig.eigenvalues(0)));
  RVector roots(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < roots.size(); ++k) {
    const double lambda = eig.eigenvalues(k);
    if (lambda < -tol.psd_clamp * scale) {
      throw DomainError("psd_sqrt: matrix is indefinite (eigenvalue " + std::to_string(lambda) + ")");
    }
    roots(k) = std::sqrt(std::max(lambda, 0.0));
  }
  const CMatrix& u = eig.eigenvectors;
  return hermitian_part(u * roots.asDiagonal() * u.adjoint());
}

CMatrix solve_hpd(const CMatrix& a, const CMatrix& b, const NumericTolerances& tol) {
  require_square(a, "solve_hpd");
  if (b.rows() != a.rows()) {
    throw DimensionError("solve_hpd: right-hand side has " + std::to_string(b.rows()) +
                         " rows, expected " + std::to_string(a.rows()));
  }
  Eigen::LLT<CMatrix> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) {
    throw SingularityError("solve_hpd: matrix is not positive definite");
  }
  // Cholesky-diagonal condition estimate; a lower bound on the 2-norm condition number.
  const RVector diag = llt.matrixLLT().diagonal().real();
  const double ratio = diag.maxCoeff() / diag.minCoeff();
  if (!(diag.minCoeff() > 0.0) || ratio * ratio > tol.max_condition) {
    throw SingularityError("solve_hpd: condition estimate exceeds limit");
  }
  return llt.solve(b);
}

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

double real_trace(const CMatrix& m) { return m.trace().real(); }

double relative_frobenius_error(const CMatrix& a, const CMatrix& b) {
  const double denom = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / denom;
}

}  // namespace fddtrain
