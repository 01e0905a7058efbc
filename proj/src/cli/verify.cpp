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

#include "fddtrain/cli/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "fddtrain/channel.hpp"
#include "fddtrain/cli/presets.hpp"
#include "fddtrain/cli/report.hpp"
#include "fddtrain/codebook.hpp"
#include "fddtrain/errors.hpp"
#include "fddtrain/estimation.hpp"
#include "fddtrain/random.hpp"
#include "fddtrain/simulator.hpp"
#include "fddtrain/strategies.hpp"

namespace fddtrain::cli {

namespace {

constexpr std::uint64_t kVerifySeed = 20260101;

struct Outcome {
  CheckStatus status = CheckStatus::kPass;
  std::ostringstream detail;

  void fail() { status = CheckStatus::kFail; }
  void warn() {
    if (status == CheckStatus::kPass) status = CheckStatus::kWarn;
  }
};

double scaled(double tol, const VerifyOptions& o) { return o.strict ? tol / 10.0 : tol; }

CMatrix unitary_training(int n, int t, double rho, RandomStream& rng) {
  return std::sqrt(rho) * haar_isometry(n, t, rng);
}

double log_uniform(RandomStream& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
}

int uniform_int(RandomStream& rng, int lo, int hi) {
  return lo + static_cast<int>(std::floor(rng.uniform() * (hi - lo + 1)));
}

void check_jakes(const VerifyOptions& o, Outcome& out) {
  const double tol = scaled(1e-4, o);
  const char* sep = "";
  for (auto [speed, expected] : {std::pair{3.0, 0.9881}, std::pair{10.0, 0.8721}}) {
    const double eta = jakes_eta(speed, 2.5e9, 5e-3);
    const double err = std::abs(eta - expected);
    out.detail << std::exchange(sep, "; ") << "v=" << speed << "km/h eta=" << format_number(eta) << " err=" << format_number(err);
    if (err > tol) {
      // The reference values carry four decimals; a miss below half a unit
      // in the last place is a resolution limit, not a defect.
      if (o.strict && err <= 5e-5) {
        out.warn();
      } else {
        out.fail();
      }
    }
  }
}

void check_closed_form(const VerifyOptions& o, Outcome& out) {
  RandomStream rng = RandomStream::substream(kVerifySeed, {1});
  const double tol = scaled(1e-10, o);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const int n = uniform_int(rng, 1, 32);
    const int t = uniform_int(rng, 1, n);
    const double a = 0.95 * rng.uniform();
    const double rho = log_uniform(rng, 0.01, 1e4);
    const CMatrix r = exponential_correlation(n, a);
    KalmanState state = KalmanState::initial(r);
    const CMatrix x = x_ss_opt(r, t, rho);
    state = kalman_correct(state, observe_noiseless(x, CVector::Zero(n)));
    const double kalman_mse = real_trace(state.r_corr) / n;
    worst = std::max(worst, std::abs(kalman_mse - mse_single_shot_optimal(r, t, rho)));
  }
  out.detail << "50 cases, worst |diff| = " << format_number(worst);
  if (worst > tol) out.fail();
}

void check_lemma4(const VerifyOptions& o, Outcome& out) {
  RandomStream rng = RandomStream::substream(kVerifySeed, {2});
  const double tol = scaled(1e-8, o);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const int n = uniform_int(rng, 1, 32);
    const int t = uniform_int(rng, 1, n);
    const double a = 0.95 * rng.uniform();
    const double rho = log_uniform(rng, 0.01, 1e4);
    const double eta = rng.uniform();
    const CMatrix r = exponential_correlation(n, a);
    const std::vector<double> closed = mse_lower_bound_closed_loop(r, eta, t, rho, 9);
    KalmanState state = KalmanState::initial(r);
    for (int i = 0; i <= 9; ++i) {
      if (i > 0) state = kalman_predict(state, eta, r);
      const CMatrix x = x_opt_full_feedback(state.r_pred, t, rho);
      state = kalman_correct(state, observe_noiseless(x, CVector::Zero(n)));
      worst = std::max(worst, std::abs(real_trace(state.r_corr) / n - closed[static_cast<size_t>(i)]));
    }
  }
  out.detail << "50 cases x 10 blocks, worst |diff| = " << format_number(worst);
  if (worst > tol) out.fail();
}

void check_orderings(const VerifyOptions&, Outcome& out) {
  std::vector<double> rho_grid;
  for (int k = 0; k <= 24; ++k) rho_grid.push_back(std::pow(10.0, -2.0 + k / 4.0));

  int violations_t = 0;
  for (double a : {0.0, 0.5, 0.9}) {
    const CMatrix r = exponential_correlation(8, a);
    for (double rho : rho_grid) {
      double prev = 0.0;
      for (int t = 1; t <= 8; ++t) {
        const double mse = mse_of_training(x_ss_opt(r, t, rho), r);
        if (t > 1 && !(mse < prev)) ++violations_t;
        prev = mse;
      }
    }
  }

  int violations_rho = 0;
  for (double a : {0.0, 0.5, 0.9}) {
    const CMatrix r = exponential_correlation(8, a);
    for (int t = 1; t <= 8; ++t) {
      double prev = 0.0;
      for (size_t k = 0; k < rho_grid.size(); ++k) {
        const double mse = mse_of_training(x_ss_opt(r, t, rho_grid[k]), r);
        if (k > 0 && !(mse < prev)) ++violations_rho;
        prev = mse;
      }
    }
  }

  int violations_major = 0;
  int unmajorized = 0;
  for (int n : {4, 8, 16, 32}) {
    const CMatrix r_h = exponential_correlation(n, 0.9);
    const CMatrix r_l = exponential_correlation(n, 0.3);
    const RVector l_h = hermitian_eig(r_h).eigenvalues;
    const RVector l_l = hermitian_eig(r_l).eigenvalues;
    double s_h = 0.0;
    double s_l = 0.0;
    for (int k = 0; k < n; ++k) {
      s_h += l_h(k);
      s_l += l_l(k);
      if (s_h < s_l - 1e-9) ++unmajorized;
    }
    for (int t = 1; t <= n; ++t) {
      for (double rho : rho_grid) {
        if (mse_of_training(x_ss_opt(r_h, t, rho), r_h) > mse_of_training(x_ss_opt(r_l, t, rho), r_l) + 1e-12) {
          ++violations_major;
        }
      }
    }
  }

  RandomStream rng = RandomStream::substream(kVerifySeed, {3});
  int violations_schur = 0;
  for (int c = 0; c < 100; ++c) {
    const int n = uniform_int(rng, 2, 16);
    const int t = uniform_int(rng, 1, n);
    const double rho = log_uniform(rng, 0.01, 100.0);
    RVector x(n);
    for (int k = 0; k < n; ++k) x(k) = 3.0 * rng.uniform();
    RVector y = x;
    for (int step = 0; step < 3; ++step) {
      const int i = uniform_int(rng, 0, n - 1);
      const int j = uniform_int(rng, 0, n - 1);
      const double theta = rng.uniform();
      const double yi = theta * y(i) + (1.0 - theta) * y(j);
      const double yj = theta * y(j) + (1.0 - theta) * y(i);
      y(i) = yi;
      y(j) = yj;
    }
    std::sort(x.begin(), x.end(), std::greater<>());
    std::sort(y.begin(), y.end(), std::greater<>());
    if (trained_energy(x, t, rho) < trained_energy(y, t, rho) - 1e-12) ++violations_schur;
  }

  out.detail << "T-monotone violations " << violations_t << ", rho-monotone " << violations_rho
             << ", majorization " << violations_major << " (spectra not majorized: " << unmajorized
             << "), Schur " << violations_schur;
  if (violations_t + violations_rho + violations_major + violations_schur + unmajorized > 0) out.fail();
}

void check_bounds(const VerifyOptions& o, Outcome& out) {
  SimConfig cfg;
  cfg.n_tx = 64;
  cfg.t_len = 4;
  cfg.a = 0.9;
  cfg.rho = 100.0;
  cfg.iterations = 300;
  cfg.strategy = StrategyKind::kClosedLoopSingleShotFull;
  cfg.master_seed = kVerifySeed;
  cfg.workers = o.workers;
  const CMatrix r = exponential_correlation(cfg.n_tx, cfg.a);
  const double upper = snr_upper_bound_ss(r, cfg.t_len, cfg.rho);
  const double ceiling = snr_ceiling_bound_exp(cfg.t_len, cfg.a);
  double worst_margin = -1e300;
  for (const auto& m : run(cfg)) {
    const double margin = (m.mean_gamma - std::min(upper, ceiling)) / std::max(m.gamma_stderr, 1e-300);
    worst_margin = std::max(worst_margin, margin);
    if (m.mean_gamma > upper + 3.0 * m.gamma_stderr || m.mean_gamma > ceiling + 3.0 * m.gamma_stderr) out.fail();
  }
  out.detail << "upper " << format_number(linear_to_db(upper)) << " dB, ceiling "
             << format_number(linear_to_db(ceiling)) << " dB, closest block at " << format_number(worst_margin)
             << " stderr from the tighter bound";
}

void check_tracking(const VerifyOptions& o, Outcome& out) {
  double worst_z = 0.0;
  for (StrategyKind kind : {StrategyKind::kOpenLoopMemory, StrategyKind::kClosedLoopMemoryMse}) {
    SimConfig cfg;
    cfg.n_tx = 16;
    cfg.t_len = 2;
    cfg.rho = 1.0;
    cfg.a = 0.9;
    cfg.iterations = 400;
    cfg.strategy = kind;
    cfg.master_seed = kVerifySeed;
    cfg.codebook_budget = 50;
    cfg.workers = o.workers;
    for (const auto& m : run(cfg)) {
      const double z = std::abs(m.mean_mse - m.analytic_mse) / std::max(m.mse_stderr, 1e-300);
      worst_z = std::max(worst_z, z);
      if (z > 3.0) out.fail();
    }
  }
  out.detail << "largest |empirical - tracked| MSE gap = " << format_number(worst_z) << " stderr";
}

struct QpCase {
  KalmanState state;
  CMatrix p;
};

QpCase random_qp_case(RandomStream& rng) {
  const int n = rng.uniform() < 0.5 ? 4 : 8;
  const int t = uniform_int(rng, 1, n / 2);
  const double a = 0.95 * rng.uniform();
  const double eta = 0.8 + 0.2 * rng.uniform();
  const double rho = log_uniform(rng, 0.1, 100.0);
  const int warmup = uniform_int(rng, 0, 3);
  ChannelConfig cc;
  cc.n_tx = n;
  cc.a = a;
  cc.eta = eta;
  const GaussMarkovChannel channel(cc);
  ChannelState h = channel.init_block(rng);
  KalmanState state = KalmanState::initial(channel.correlation());
  for (int i = 0; i < warmup; ++i) {
    state = kalman_correct(state, observe(unitary_training(n, t, rho, rng), h.h, rng));
    state = kalman_predict(state, eta, channel.correlation());
    h = channel.evolve_block(h, rng);
  }
  return {state, unitary_training(n, t, rho, rng)};
}

// Sample mean of h^H R_c h / ||h||^2 over h ~ CN(h_pred, R_p).
double monte_carlo_ratio(const QpCase& c, int samples, RandomStream& rng) {
  const CMatrix r_p = posterior_gain_matrix(c.state.r_pred, c.p);
  const CMatrix r_c = c.state.r_pred - r_p;
  const CMatrix root = psd_sqrt(r_p);
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    const CVector h = c.state.h_pred + root * rng.complex_normal_vector(root.rows());
    sum += h.dot(r_c * h).real() / h.squaredNorm();
  }
  return sum / samples;
}

void check_qp(const VerifyOptions& o, Outcome& out) {
  RandomStream rng = RandomStream::substream(kVerifySeed, {4});
  RandomStream mc = RandomStream::substream(kVerifySeed, {5});
  const double tol = scaled(0.10, o);
  const int samples = 200000;
  double worst_printed = 0.0;
  double worst_circular = 0.0;
  double mean_printed = 0.0;
  double mean_circular = 0.0;
  const int cases = 20;
  for (int k = 0; k < cases; ++k) {
    const QpCase c = random_qp_case(rng);
    const double truth = monte_carlo_ratio(c, samples, mc);
    const double printed = snr_objective(c.p, c.state, MomentConvention::kPrinted).q;
    const double circular = snr_objective(c.p, c.state, MomentConvention::kCircularGaussian).q;
    const double e_p = (printed - truth) / truth;
    const double e_c = (circular - truth) / truth;
    worst_printed = std::max(worst_printed, std::abs(e_p));
    worst_circular = std::max(worst_circular, std::abs(e_c));
    mean_printed += e_p / cases;
    mean_circular += e_c / cases;
  }
  out.detail << "worst relative error: printed constants " << format_number(100 * worst_printed)
             << "%, circular-Gaussian moments " << format_number(100 * worst_circular) << "%; mean signed "
             << format_number(100 * mean_printed) << "% vs " << format_number(100 * mean_circular) << "%";
  // The delta-method approximation is judged with exact circular-Gaussian
  // moments. Inside the default tolerance a miss is second-order residue;
  // a printed-constant miss the exact moments do not share comes from the
  // Var/Cov constants and is reported, not failed.
  if (worst_circular > 0.10) {
    out.fail();
  } else if (worst_circular > tol) {
    out.warn();
  }
  if (worst_printed > tol || std::abs(mean_printed - mean_circular) > 0.005) {
    out.warn();
    out.detail << "; WARNING: printed Var/Cov constants (4, 2) deviate from circular-Gaussian constants (2, 1)"
                  " by up to "
               << format_number(100 * worst_printed) << "%, see README";
  }
}

void check_codebook(const VerifyOptions& o, Outcome& out) {
  const TrainingCodebook gsp = design_gsp(16, 2, 6, 1.0, 200, kVerifySeed);
  const TrainingCodebook random = random_search_codebook(16, 2, 6, 1.0, 100, kVerifySeed);
  const TrainingCodebook line = design_gsp(2, 1, 1, 1.0, 200, kVerifySeed);
  out.detail << "GSP(16,2,6) " << format_number(gsp.min_chordal) << " vs best of 100 random "
             << format_number(random.min_chordal) << "; GSP(2,1,1) " << format_number(line.min_chordal);
  if (!(gsp.min_chordal > random.min_chordal)) out.fail();
  if (std::abs(line.min_chordal - 1.0) > scaled(1e-3, o)) out.fail();
}

void check_determinism(const VerifyOptions&, Outcome& out) {
  SimConfig cfg;
  cfg.n_tx = 8;
  cfg.t_len = 2;
  cfg.rho = 1.0;
  cfg.a = 0.9;
  cfg.iterations = 60;
  cfg.strategy = StrategyKind::kClosedLoopMemorySnr;
  cfg.master_seed = kVerifySeed;
  cfg.codebook_budget = 20;
  std::string reference;
  for (int workers : {1, 3, 7}) {
    cfg.workers = workers;
    const std::string csv = to_csv({RunResult{cfg, run(cfg)}});
    if (reference.empty()) {
      reference = csv;
    } else if (csv != reference) {
      out.fail();
    }
  }
  out.detail << "1, 3 and 7 workers " << (out.status == CheckStatus::kPass ? "agree byte for byte" : "disagree");
}

using CheckFn = void (*)(const VerifyOptions&, Outcome&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> table = {
      {"jakes", check_jakes},       {"closed-form", check_closed_form}, {"lemma4", check_lemma4},
      {"orderings", check_orderings}, {"bounds", check_bounds},         {"tracking", check_tracking},
      {"qp", check_qp},             {"codebook", check_codebook},       {"determinism", check_determinism},
  };
  return table;
}

}  // namespace

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass:
      return "PASS";
    case CheckStatus::kWarn:
      return "WARN";
    case CheckStatus::kFail:
      return "FAIL";
  }
  return "FAIL";
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

CheckResult run_check(std::string_view name, const VerifyOptions& options) {
  for (const auto& [check_name, fn] : registry()) {
    if (check_name != name) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    CheckResult result;
    result.name = check_name;
    try {
      fn(options, outcome);
      result.status = outcome.status;
      result.detail = outcome.detail.str();
    } catch (const std::exception& e) {
      result.status = CheckStatus::kFail;
      result.detail = std::string("error: ") + e.what();
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }
  std::string known;
  for (const auto& n : check_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown check '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace fddtrain::cli
