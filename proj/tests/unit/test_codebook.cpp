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
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "fddtrain/codebook.hpp"
#include "fddtrain/errors.hpp"
#include "json.hpp"

using namespace fddtrain;

TEST_CASE("chordal distance matches projector definition and ignores basis and power") {
  oracle::Gauss g(201);
  for (int k = 0; k < 40; ++k) {
    const int n = 2 + k % 10;
    const int t = 1 + k % (n - 1);
    const CMatrix x = oracle::random_isometry(n, t, g);
    const CMatrix y = oracle::random_isometry(n, t, g);
    const CMatrix u = oracle::random_isometry(t, t, g);
    const double d = chordal_distance(x, y);
    CHECK(d == doctest::Approx(oracle::chordal(x, y)).epsilon(1e-10));
    CHECK(d == doctest::Approx(chordal_distance(y, x)).epsilon(1e-12));
    CHECK(chordal_distance(3.0 * x * u, y) == doctest::Approx(d).epsilon(1e-10));
    CHECK(chordal_distance(x, x * u) < 1e-7);
    CHECK(d <= std::sqrt(static_cast<double>(std::min(t, n - t))) + 1e-12);
  }
  CHECK_THROWS_AS(chordal_distance(CMatrix::Zero(3, 1), CMatrix::Identity(3, 1)), DomainError);
  CHECK_THROWS_AS(chordal_distance(CMatrix::Identity(3, 1), CMatrix::Identity(4, 1)), DimensionError);
}

TEST_CASE("random codebooks satisfy their invariants") {
  const TrainingCodebook cb = random_codebook(8, 2, 4, 10.0, 5);
  CHECK(cb.size() == 16);
  CHECK_NOTHROW(cb.validate());
  for (const CMatrix& x : cb.entries) CHECK((x.adjoint() * x - 10.0 * CMatrix::Identity(2, 2)).norm() < 1e-9);
  CHECK(cb.min_chordal == doctest::Approx(oracle::min_chordal(cb.entries)).epsilon(1e-10));
  CHECK(random_codebook(8, 2, 4, 10.0, 5).entries[3] == cb.entries[3]);
  CHECK(random_codebook(8, 2, 4, 10.0, 5, 1).entries[3] != cb.entries[3]);
}

TEST_CASE("rescaling keeps subspaces") {
  const TrainingCodebook cb = random_codebook(6, 2, 3, 1.0, 9);
  const TrainingCodebook big = cb.rescaled(100.0);
  CHECK(big.rho == 100.0);
  CHECK(big.min_chordal == doctest::Approx(cb.min_chordal));
  CHECK_NOTHROW(big.validate());
  CHECK(relative_frobenius_error(big.entries[2], 10.0 * cb.entries[2]) < 1e-14);
}

TEST_CASE("single-entry codebook has infinite minimum distance") {
  const TrainingCodebook cb = random_codebook(4, 1, 0, 1.0, 2);
  CHECK(cb.size() == 1);
  CHECK(std::isinf(cb.min_chordal));
  const std::string text = codebook_to_json(cb);
  CHECK(nlohmann::json::parse(text).at("min_chordal").is_null());
  CHECK(std::isinf(codebook_from_json(text).min_chordal));
}

TEST_CASE("GSP design never packs worse than its first start and is deterministic") {
  for (int bits : {1, 3, 5}) {
    const TrainingCodebook gsp = design_gsp(8, 2, bits, 1.0, 50, 17);
    CHECK_NOTHROW(gsp.validate());
    CHECK(gsp.min_chordal >= random_codebook(8, 2, bits, 1.0, 17, 0).min_chordal - 1e-12);
    CHECK(codebook_to_json(design_gsp(8, 2, bits, 1.0, 50, 17)) == codebook_to_json(gsp));
  }
  // Two lines in C^2 can be made orthogonal.
  CHECK(design_gsp(2, 1, 1, 1.0, 200, 3).min_chordal > 0.99);
}

TEST_CASE("JSON round trip is byte-identical") {
  const TrainingCodebook cb = design_gsp(6, 3, 3, 2.5, 20, 4);
  const std::string text = codebook_to_json(cb);
  const TrainingCodebook back = codebook_from_json(text);
  CHECK(codebook_to_json(back) == text);
  for (size_t k = 0; k < cb.size(); ++k) CHECK(back.entries[k] == cb.entries[k]);

  const auto path = std::filesystem::temp_directory_path() / "fddtrain_unit_codebook.json";
  save_codebook(cb, path);
  CHECK(codebook_to_json(load_codebook(path)) == text);
  std::filesystem::remove(path);
}

TEST_CASE("tampered or foreign files are rejected") {
  const TrainingCodebook cb = random_codebook(4, 2, 2, 1.0, 8);
  const auto doc = nlohmann::json::parse(codebook_to_json(cb));

  auto entry = doc;
  entry["entries"][1][0][0][0] = entry["entries"][1][0][0][0].get<double>() + 0.1;
  CHECK_THROWS_AS(codebook_from_json(entry.dump()), FormatError);

  auto cached = doc;
  cached["min_chordal"] = cached["min_chordal"].get<double>() * 0.9;
  CHECK_THROWS_AS(codebook_from_json(cached.dump()), FormatError);

  auto count = doc;
  count["bits"] = 3;
  CHECK_THROWS_AS(codebook_from_json(count.dump()), FormatError);

  auto version = doc;
  version["version"] = kCodebookFormatVersion + 1;
  CHECK_THROWS_AS(codebook_from_json(version.dump()), UnsupportedVersionError);

  auto missing = doc;
  missing.erase("rho");
  CHECK_THROWS_AS(codebook_from_json(missing.dump()), FormatError);

  CHECK_THROWS_AS(codebook_from_json("{not json"), FormatError);
  CHECK_THROWS_AS(load_codebook("/nonexistent/fddtrain.json"), FormatError);
}

TEST_CASE("codebook argument checks") {
  CHECK_THROWS_AS(random_codebook(4, 5, 1, 1.0, 1), DomainError);
  CHECK_THROWS_AS(random_codebook(4, 1, kMaxCodebookBits + 1, 1.0, 1), DomainError);
  CHECK_THROWS_AS(random_codebook(4, 1, 1, 0.0, 1), DomainError);
  CHECK_THROWS_AS(design_gsp(4, 1, 1, 1.0, -1, 1), DomainError);
  CHECK_THROWS_AS(random_search_codebook(4, 1, 1, 1.0, 0, 1), DomainError);
}
