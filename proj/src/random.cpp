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

#include "fddtrain/random.hpp"

#include <cmath>

#include "fddtrain/errors.hpp"

namespace fddtrain {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

RandomStream RandomStream::substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t state = mix64(master_seed);
  for (std::uint64_t key : keys) state = mix64(state ^ mix64(key + 0x632be59bd9b4e019ULL));
  return RandomStream(state);
}

double RandomStream::uniform() { return uniform_(engine_); }

double RandomStream::normal() { return normal_(engine_); }

Complex RandomStream::complex_normal() {
  static const double kHalf = std::sqrt(0.5);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {kHalf * re, kHalf * im};
}

CVector RandomStream::complex_normal_vector(Eigen::Index n) {
  CVector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = complex_normal();
  return v;
}

CMatrix RandomStream::complex_normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex_normal();
  }
  return m;
}

CMatrix haar_isometry(Eigen::Index n, Eigen::Index t, RandomStream& rng) {
  if (t < 1 || t > n) throw DomainError("haar_isometry: need 1 <= t <= n");
  const CMatrix g = rng.complex_normal_matrix(n, t);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, t);
  // Fix column phases against diag(R) so the distribution is Haar.
  const CMatrix r = qr.matrixQR().topRows(t).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < t; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

}  // namespace fddtrain
