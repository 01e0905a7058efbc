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
#include <filesystem>
#include <string>
#include <vector>

#include "fddtrain/numerics.hpp"

namespace fddtrain {

inline constexpr int kCodebookFormatVersion = 1;
inline constexpr int kMaxCodebookBits = 16;

/// Indexed set of 2^B unitary N_t x T training matrices shared by both link
/// ends. Entries satisfy X^H X = rho I.
struct TrainingCodebook {
  int n_tx = 0;
  int t_len = 0;
  int bits = 0;
  double rho = 1.0;
  std::uint64_t seed = 0;
  std::vector<CMatrix> entries;
  /// Cached minimum pairwise chordal distance; +inf for a single entry.
  double min_chordal = 0.0;

  size_t size() const { return entries.size(); }

  /// Throws FormatError if any invariant (shape, count, unitarity, cached
  /// distance) fails.
  void validate(double tol = 1e-9) const;

  /// Same subspaces at a different per-pilot power.
  TrainingCodebook rescaled(double new_rho) const;
};

/// (1/sqrt 2) ||P_x - P_y||_F between the column-space projectors of the
/// power-normalized inputs, so the value does not depend on rho.
double chordal_distance(const CMatrix& x, const CMatrix& y);

/// Minimum chordal distance over all unordered pairs (needs >= 2 entries).
double min_chordal_distance(const std::vector<CMatrix>& entries);

/// Codebook of 2^bits independent Haar-random entries. Candidate `index`
/// draws from its own substream of `seed`.
TrainingCodebook random_codebook(int n_tx, int t_len, int bits, double rho, std::uint64_t seed,
                                 std::uint64_t index = 0);

/// Best (largest minimum distance) of `candidates` random codebooks,
/// candidate indices 0..candidates-1.
TrainingCodebook random_search_codebook(int n_tx, int t_len, int bits, double rho, int candidates,
                                        std::uint64_t seed);

struct GspOptions {
  int restarts = 4;
};

/// Grassmannian subspace packing: multi-start random initialization followed
/// by `budget` refinement steps per start, each pushing one member of the
/// closest pair away from its neighbours and keeping the move only if that
/// member's worst distance improves. The first start is
/// random_codebook(seed, 0), so the result never packs worse than it.
TrainingCodebook design_gsp(int n_tx, int t_len, int bits, double rho, int budget, std::uint64_t seed,
                            const GspOptions& options = {});

void save_codebook(const TrainingCodebook& cb, const std::filesystem::path& path);
std::string codebook_to_json(const TrainingCodebook& cb);

/// Parses and re-validates a codebook file. Throws UnsupportedVersionError
/// for unknown versions and FormatError for anything malformed.
TrainingCodebook load_codebook(const std::filesystem::path& path);
TrainingCodebook codebook_from_json(const std::string& text);

}  // namespace fddtrain
