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

#include "fddtrain/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <tuple>

#include "fddtrain/channel.hpp"
#include "fddtrain/errors.hpp"
#include "fddtrain/estimation.hpp"
#include "fddtrain/random.hpp"

namespace fddtrain {

namespace {

// Summation order is fixed by the index range alone.
double pairwise_sum(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += x[k];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(x, lo, mid) + pairwise_sum(x, mid, hi);
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& x) {
  const std::size_t n = x.size();
  MeanStderr out;
  if (n == 0) return out;
  out.mean = pairwise_sum(x, 0, n) / static_cast<double>(n);
  if (n < 2) return out;
  std::vector<double> dev(n);
  for (std::size_t k = 0; k < n; ++k) dev[k] = (x[k] - out.mean) * (x[k] - out.mean);
  const double var = pairwise_sum(dev, 0, n) / static_cast<double>(n - 1);
  out.stderr_ = std::sqrt(var / static_cast<double>(n));
  return out;
}

struct RunContext {
  const SimConfig& cfg;
  GaussMarkovChannel channel;
  std::shared_ptr<const TrainingCodebook> codebook;
  CMatrix single_shot_optimal;
  double eta;
};

void simulate_iteration(const RunContext& ctx, std::size_t it, SimSamples& out) {
  const SimConfig& cfg = ctx.cfg;
  const CMatrix& r = ctx.channel.correlation();
  const double n = static_cast<double>(cfg.n_tx);
  const auto seed = cfg.master_seed;
  const bool memory = uses_memory(cfg.strategy);

  // Closed-loop selection ignores the order; only round robin consumes it.
  std::vector<size_t> order;
  if (ctx.codebook && cfg.shuffle_codebook) {
    order.resize(ctx.codebook->size());
    std::iota(order.begin(), order.end(), size_t{0});
    RandomStream shuffle_rng =
        RandomStream::substream(seed, {it, 0, static_cast<std::uint64_t>(StreamPurpose::kShuffle)});
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
  }

  const auto stream = [&](std::size_t block, StreamPurpose purpose) {
    return RandomStream::substream(seed, {it, block, static_cast<std::uint64_t>(purpose)});
  };

  RandomStream channel_rng = stream(0, StreamPurpose::kChannel);
  ChannelState state = ctx.channel.init_block(channel_rng);
  KalmanState kalman = KalmanState::initial(r);

  for (std::size_t i = 0; i < static_cast<std::size_t>(out.blocks); ++i) {
    if (i > 0) {
      RandomStream evolve_rng = stream(i, StreamPurpose::kChannel);
      state = ctx.channel.evolve_block(state, evolve_rng);
      if (memory) {
        kalman = kalman_predict(kalman, ctx.eta, r);
      } else {
        kalman = KalmanState::initial(r);
        kalman.block_index = static_cast<int>(i);
      }
    }

    StrategyContext sctx;
    sctx.kind = cfg.strategy;
    sctx.codebook = ctx.codebook.get();
    sctx.order = order;
    sctx.kalman = &kalman;
    sctx.block_index = i;
    sctx.t_len = cfg.t_len;
    sctx.rho = cfg.rho;
    sctx.single_shot_optimal = ctx.single_shot_optimal.size() > 0 ? &ctx.single_shot_optimal : nullptr;
    sctx.convention = cfg.convention;
    const StrategyDecision decision = choose_training(sctx);

    RandomStream noise_rng = stream(i, StreamPurpose::kNoise);
    const TrainingObservation obs = observe(decision.x, state.h, noise_rng);
    kalman = kalman_correct(kalman, obs);

    const Beamformer bf = beamformer(kalman.h_corr);
    const std::size_t slot = out.slot(static_cast<int>(it), static_cast<int>(i));
    out.gamma[slot] = realized_snr(state.h, bf.w);
    out.mse[slot] = (state.h - kalman.h_corr).squaredNorm() / n;
    out.analytic[slot] = real_trace(kalman.r_corr) / n;
    out.fallback[slot] = bf.fallback ? 1 : 0;
  }
}

}  // namespace

double EtaSource::resolve() const {
  if (eta) {
    if (!(*eta >= 0.0 && *eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
    return *eta;
  }
  if (!(speed_kmh >= 0.0) || !(carrier_hz > 0.0) || !(block_s > 0.0)) {
    throw ConfigError("Doppler parameters must be non-negative speed, positive carrier and block duration");
  }
  const double value = jakes_eta(speed_kmh, carrier_hz, block_s);
  // J0 goes negative past its first zero; the Gauss-Markov model needs [0, 1].
  if (value < 0.0) throw ConfigError("Doppler parameters give a negative temporal correlation");
  return value;
}

void SimConfig::validate() const {
  if (n_tx < 1) throw ConfigError("n_tx must be >= 1");
  if (t_len < 1 || t_len > n_tx) throw ConfigError("t_len must lie in [1, n_tx]");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be finite and >= 0");
  if (!(a >= 0.0 && a < 1.0)) throw ConfigError("a must lie in [0, 1)");
  if (bits < 0 || bits > kMaxCodebookBits) {
    throw ConfigError("bits must lie in [0, " + std::to_string(kMaxCodebookBits) + "]");
  }
  if (blocks_per_iteration < 1) throw ConfigError("blocks_per_iteration must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (codebook_budget < 0) throw ConfigError("codebook_budget must be >= 0");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  eta.resolve();
  if (codebook && uses_codebook(strategy)) {
    if (codebook->n_tx != n_tx || codebook->t_len != t_len) {
      throw ConfigError("codebook shape " + std::to_string(codebook->n_tx) + "x" + std::to_string(codebook->t_len) +
                        " does not match n_tx x t_len " + std::to_string(n_tx) + "x" + std::to_string(t_len));
    }
  }
}

std::shared_ptr<const TrainingCodebook> resolve_codebook(const SimConfig& cfg) {
  if (!uses_codebook(cfg.strategy)) return nullptr;
  if (cfg.codebook) {
    if (cfg.codebook->rho == cfg.rho) return cfg.codebook;
    return std::make_shared<const TrainingCodebook>(cfg.codebook->rescaled(cfg.rho));
  }
  const TrainingCodebook unit = design_gsp(cfg.n_tx, cfg.t_len, cfg.bits, 1.0, cfg.codebook_budget, cfg.codebook_seed);
  return std::make_shared<const TrainingCodebook>(unit.rescaled(cfg.rho));
}

int resolve_workers(const SimConfig& cfg) {
  int workers = cfg.workers;
  if (workers == 0) {
    if (const char* env = std::getenv("FDDTRAIN_WORKERS")) {
      char* end = nullptr;
      const long parsed = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && parsed > 0) workers = static_cast<int>(parsed);
    }
  }
  if (workers == 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::min(workers, cfg.iterations);
}

SimSamples run_samples(const SimConfig& cfg) {
  cfg.validate();
  ChannelConfig channel_cfg;
  channel_cfg.n_tx = cfg.n_tx;
  channel_cfg.a = cfg.a;
  channel_cfg.eta = cfg.eta.resolve();
  channel_cfg.seed = cfg.master_seed;
  RunContext ctx{cfg, GaussMarkovChannel(channel_cfg), resolve_codebook(cfg), CMatrix(), channel_cfg.eta};
  if (cfg.strategy == StrategyKind::kClosedLoopSingleShotFull) {
    ctx.single_shot_optimal = x_ss_opt(ctx.channel.correlation(), cfg.t_len, cfg.rho);
  }

  SimSamples table;
  table.iterations = cfg.iterations;
  table.blocks = cfg.blocks_per_iteration;
  const std::size_t cells = static_cast<std::size_t>(cfg.iterations) * static_cast<std::size_t>(cfg.blocks_per_iteration);
  table.gamma.resize(cells);
  table.mse.resize(cells);
  table.analytic.resize(cells);
  table.fallback.resize(cells);

  const auto iterations = static_cast<std::size_t>(cfg.iterations);
  const int workers = resolve_workers(cfg);
  // Each iteration writes only its own rows, so workers share nothing mutable.
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const auto work = [&](int w) {
    try {
      for (std::size_t it = static_cast<std::size_t>(w); it < iterations; it += static_cast<std::size_t>(workers)) {
        simulate_iteration(ctx, it, table);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return table;
}

std::vector<BlockMetrics> summarize(const SimSamples& samples) {
  std::vector<BlockMetrics> result;
  const auto iterations = static_cast<std::size_t>(samples.iterations);
  std::vector<double> column(iterations);
  const auto gather = [&](const std::vector<double>& src, int block) {
    for (std::size_t it = 0; it < iterations; ++it) column[it] = src[samples.slot(static_cast<int>(it), block)];
    return mean_stderr(column);
  };
  for (int b = 0; b < samples.blocks; ++b) {
    BlockMetrics m;
    m.block_index = b;
    const MeanStderr g = gather(samples.gamma, b);
    const MeanStderr e = gather(samples.mse, b);
    const MeanStderr an = gather(samples.analytic, b);
    m.mean_gamma = g.mean;
    m.gamma_stderr = g.stderr_;
    m.mean_gamma_db = 10.0 * std::log10(g.mean);
    m.gamma_stderr_db = g.mean > 0.0 ? 10.0 / std::log(10.0) * g.stderr_ / g.mean : 0.0;
    m.mean_mse = e.mean;
    m.mse_stderr = e.stderr_;
    m.analytic_mse = an.mean;
    m.samples = iterations;
    for (std::size_t it = 0; it < iterations; ++it) m.fallbacks += samples.fallback[samples.slot(static_cast<int>(it), b)];
    result.push_back(m);
  }
  return result;
}

std::vector<BlockMetrics> run(const SimConfig& cfg) { return summarize(run_samples(cfg)); }

SweepAxis parse_sweep_axis(std::string_view name) {
  for (SweepAxis axis : {SweepAxis::kNTx, SweepAxis::kRho, SweepAxis::kA, SweepAxis::kTLen, SweepAxis::kBits,
                         SweepAxis::kStrategy, SweepAxis::kEta}) {
    if (to_string(axis) == name) return axis;
  }
  throw ConfigError("invalid sweep axis '" + std::string(name) +
                    "' (expected n_tx, rho, a, t_len, bits, strategy or eta)");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNTx:
      return "n_tx";
    case SweepAxis::kRho:
      return "rho";
    case SweepAxis::kA:
      return "a";
    case SweepAxis::kTLen:
      return "t_len";
    case SweepAxis::kBits:
      return "bits";
    case SweepAxis::kStrategy:
      return "strategy";
    case SweepAxis::kEta:
      return "eta";
  }
  return "unknown";
}

std::vector<SweepPoint> run_sweep(const SimConfig& base, SweepAxis axis, const std::vector<SweepValue>& values) {
  using Key = std::tuple<int, int, int>;
  std::map<Key, std::shared_ptr<const TrainingCodebook>> designed;

  std::vector<SweepPoint> table;
  table.reserve(values.size());
  for (const SweepValue& value : values) {
    SimConfig cfg = base;
    if (axis == SweepAxis::kStrategy) {
      const auto* kind = std::get_if<StrategyKind>(&value);
      if (kind == nullptr) throw ConfigError("strategy axis needs strategy values");
      cfg.strategy = *kind;
    } else {
      const auto* number = std::get_if<double>(&value);
      if (number == nullptr) throw ConfigError(std::string(to_string(axis)) + " axis needs numeric values");
      const double v = *number;
      const auto as_int = [&]() {
        if (v != std::floor(v)) throw ConfigError(std::string(to_string(axis)) + " values must be integers");
        return static_cast<int>(v);
      };
      switch (axis) {
        case SweepAxis::kNTx:
          cfg.n_tx = as_int();
          break;
        case SweepAxis::kRho:
          cfg.rho = v;
          break;
        case SweepAxis::kA:
          cfg.a = v;
          break;
        case SweepAxis::kTLen:
          cfg.t_len = as_int();
          break;
        case SweepAxis::kBits:
          cfg.bits = as_int();
          break;
        case SweepAxis::kEta:
          cfg.eta = EtaSource::direct(v);
          break;
        case SweepAxis::kStrategy:
          break;
      }
    }

    const bool shape_changed = axis == SweepAxis::kNTx || axis == SweepAxis::kTLen || axis == SweepAxis::kBits;
    if (uses_codebook(cfg.strategy) && (!cfg.codebook || shape_changed)) {
      if (shape_changed) cfg.codebook.reset();
      const Key key{cfg.n_tx, cfg.t_len, cfg.bits};
      auto found = designed.find(key);
      if (found == designed.end()) {
        SimConfig unit = cfg;
        unit.codebook.reset();
        found = designed.emplace(key, resolve_codebook(unit)).first;
      }
      cfg.codebook = found->second;
    }
    cfg.validate();
    if (cfg.codebook && uses_codebook(cfg.strategy)) cfg.codebook = resolve_codebook(cfg);
    SweepPoint point{cfg, run(cfg)};
    table.push_back(std::move(point));
  }
  return table;
}

}  // namespace fddtrain
