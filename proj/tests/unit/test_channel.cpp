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
#include "fddtrain/random.hpp"

using namespace fddtrain;

TEST_CASE("exponential correlation entries and unit trace") {
  for (int n : {1, 2, 7, 64}) {
    for (double a : {0.0, 0.3, 0.9, 0.99}) {
      const CMatrix r = exponential_correlation(n, a);
      CHECK((r - oracle::exp_corr(n, a)).norm() == 0.0);
      CHECK(real_trace(r) == doctest::Approx(n));
    }
  }
  CHECK_THROWS_AS(exponential_correlation(4, 1.0), DomainError);
  CHECK_THROWS_AS(exponential_correlation(4, -0.1), DomainError);
  CHECK_THROWS_AS(exponential_correlation(0, 0.5), DomainError);
}

TEST_CASE("Jakes coefficient at 2.5 GHz and 5 ms") {
  CHECK(jakes_eta(3.0, 2.5e9, 5e-3) == doctest::Approx(0.9881).epsilon(1e-4 / 0.9881));
  CHECK(jakes_eta(10.0, 2.5e9, 5e-3) == doctest::Approx(0.8721).epsilon(1e-4 / 0.8721));
  CHECK(jakes_eta(0.0, 2.5e9, 5e-3) == 1.0);
  for (double v = 0.5; v < 30.0; v += 1.7) CHECK(std::abs(jakes_eta(v, 2.5e9, 5e-3) - oracle::jakes(v, 2.5e9, 5e-3)) < 1e-12);
}

TEST_CASE("ChannelConfig validation") {
  ChannelConfig cfg{4, 0.5, 0.9, 1};
  CHECK_NOTHROW(cfg.validate());
  cfg.a = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.a = 0.5;
  cfg.eta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.eta = 0.5;
  cfg.n_tx = 0;
  CHECK_THROWS_AS(GaussMarkovChannel{cfg}, DomainError);
}

TEST_CASE("Gauss-Markov channel second-order statistics") {
  const int n = 4;
  const double a = 0.7;
  const double eta = 0.8;
  GaussMarkovChannel ch(ChannelConfig{n, a, eta, 3});
  CHECK((ch.correlation_sqrt() * ch.correlation_sqrt() - ch.correlation()).norm() < 1e-10);

  const int draws = 40000;
  CMatrix c00 = CMatrix::Zero(n, n);
  CMatrix c11 = CMatrix::Zero(n, n);
  CMatrix c10 = CMatrix::Zero(n, n);
  RandomStream rng(99);
  for (int k = 0; k < draws; ++k) {
    const ChannelState h0 = ch.init_block(rng);
    const ChannelState h1 = ch.evolve_block(h0, rng);
    CHECK(h1.block_index == h0.block_index + 1);
    c00 += h0.h * h0.h.adjoint();
    c11 += h1.h * h1.h.adjoint();
    c10 += h1.h * h0.h.adjoint();
  }
  const CMatrix r = oracle::exp_corr(n, a);
  // Entry standard deviation is at most 1/sqrt(draws) = 0.005.
  CHECK((c00 / draws - r).cwiseAbs().maxCoeff() < 0.03);
  CHECK((c11 / draws - r).cwiseAbs().maxCoeff() < 0.03);
  CHECK((c10 / draws - eta * r).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("substreams are reproducible and distinct") {
  RandomStream a = RandomStream::substream(5, {1, 2, 3});
  RandomStream b = RandomStream::substream(5, {1, 2, 3});
  RandomStream c = RandomStream::substream(5, {1, 2, 4});
  const double x = a.normal();
  CHECK(x == b.normal());
  CHECK(x != c.normal());
}
