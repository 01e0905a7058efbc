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

#include "fddtrain/cli/presets.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>

#include "fddtrain/errors.hpp"

namespace fddtrain::cli {

namespace {

using K = StrategyKind;

// Strategies drawn in every block-index figure.
constexpr K kTrackingSet[] = {K::kOpenLoopSingleShot, K::kOpenLoopMemory, K::kClosedLoopMemoryMse,
                              K::kClosedLoopMemorySnr};

// Spatial correlation grids. The block-index and antenna-sweep figures show
// a moderate and a strong correlation; the ceiling figure adds i.i.d.
constexpr double kCorrelationGrid[] = {0.5, 0.9};
constexpr double kCeilingCorrelationGrid[] = {0.0, 0.5, 0.9};

class PresetBuilder {
 public:
  explicit PresetBuilder(const PresetOptions& options) : options_(options) {}

  SimConfig config(int n_tx, int t_len, double rho_db, double a, StrategyKind kind) const {
    SimConfig cfg;
    cfg.n_tx = n_tx;
    cfg.t_len = t_len;
    cfg.rho = db_to_linear(rho_db);
    cfg.a = a;
    cfg.eta = EtaSource::doppler(3.0);
    cfg.bits = 6;
    cfg.blocks_per_iteration = 10;
    cfg.iterations = options_.iterations;
    cfg.strategy = kind;
    cfg.master_seed = options_.seed;
    cfg.codebook_seed = options_.seed;
    cfg.codebook_budget = options_.codebook_budget;
    cfg.workers = options_.workers;
    return cfg;
  }

  // Block-index figure: the tracking strategies plus the single-shot
  // baseline that spends T = N_t channel uses on training.
  void tracking_figure(ExperimentPreset& preset, int n_tx, double rho_db, int t_len) const {
    for (double a : kCorrelationGrid) {
      for (K kind : kTrackingSet) preset.runs.push_back(config(n_tx, t_len, rho_db, a, kind));
      preset.runs.push_back(config(n_tx, n_tx, rho_db, a, K::kOpenLoopSingleShot));
    }
  }

  void mse_figure(ExperimentPreset& preset, int n_tx, double rho_db, int t_len) const {
    for (double a : kCorrelationGrid) {
      for (K kind : kTrackingSet) preset.runs.push_back(config(n_tx, t_len, rho_db, a, kind));
    }
  }

  void antenna_figure(ExperimentPreset& preset, double rho_db, int t_len) const {
    for (double a : kCorrelationGrid) {
      for (int n_tx : {16, 32, 64, 128}) {
        for (K kind : kTrackingSet) preset.runs.push_back(config(n_tx, t_len, rho_db, a, kind));
        preset.runs.push_back(config(n_tx, t_len, rho_db, a, K::kClosedLoopSingleShotFull));
      }
    }
  }

 private:
  PresetOptions options_;
};

using Recipe = std::function<void(const PresetBuilder&, ExperimentPreset&)>;

const std::map<std::string, std::pair<std::string, Recipe>, std::less<>>& recipes() {
  static const std::map<std::string, std::pair<std::string, Recipe>, std::less<>> table = {
      {"fig1",
       {"single-shot optimal training vs N_t with upper bounds, rho=20dB, T=4",
        [](const PresetBuilder& b, ExperimentPreset& p) {
          p.with_bounds = true;
          for (double a : kCeilingCorrelationGrid) {
            for (int n_tx : {4, 8, 16, 32, 64}) {
              p.runs.push_back(b.config(n_tx, 4, 20.0, a, K::kOpenLoopSingleShot));
              p.runs.push_back(b.config(n_tx, 4, 20.0, a, K::kClosedLoopSingleShotFull));
            }
          }
        }}},
      {"fig3",
       {"SNR-based closed loop vs block index for B in {2,4,6,8}, rho=0dB, T=2, a=0.9",
        [](const PresetBuilder& b, ExperimentPreset& p) {
          for (int n_tx : {16, 64}) {
            for (int bits : {2, 4, 6, 8}) {
              SimConfig cfg = b.config(n_tx, 2, 0.0, 0.9, K::kClosedLoopMemorySnr);
              cfg.bits = bits;
              p.runs.push_back(cfg);
            }
          }
        }}},
      {"fig4a", {"N_t=16, rho=0dB, T=1", [](const PresetBuilder& b, ExperimentPreset& p) { b.tracking_figure(p, 16, 0.0, 1); }}},
      {"fig4b", {"N_t=16, rho=0dB, T=2", [](const PresetBuilder& b, ExperimentPreset& p) { b.tracking_figure(p, 16, 0.0, 2); }}},
      {"fig4c", {"N_t=16, rho=20dB, T=1", [](const PresetBuilder& b, ExperimentPreset& p) { b.tracking_figure(p, 16, 20.0, 1); }}},
      {"fig4d", {"N_t=16, rho=20dB, T=2", [](const PresetBuilder& b, ExperimentPreset& p) { b.tracking_figure(p, 16, 20.0, 2); }}},
      {"fig5a", {"N_t=64, rho=0dB, T=2", [](const PresetBuilder& b, ExperimentPreset& p) { b.tracking_figure(p, 64, 0.0, 2); }}},
      {"fig5b", {"N_t=64, rho=0dB, T=4", [](const PresetBuilder& b, ExperimentPreset& p) { b.tracking_figure(p, 64, 0.0, 4); }}},
      {"fig5c", {"N_t=64, rho=20dB, T=2", [](const PresetBuilder& b, ExperimentPreset& p) { b.tracking_figure(p, 64, 20.0, 2); }}},
      {"fig5d", {"N_t=64, rho=20dB, T=4", [](const PresetBuilder& b, ExperimentPreset& p) { b.tracking_figure(p, 64, 20.0, 4); }}},
      {"fig6a", {"MSE vs block index, N_t=16, rho=0dB, T=2", [](const PresetBuilder& b, ExperimentPreset& p) { b.mse_figure(p, 16, 0.0, 2); }}},
      {"fig6b", {"MSE vs block index, N_t=64, rho=20dB, T=4", [](const PresetBuilder& b, ExperimentPreset& p) { b.mse_figure(p, 64, 20.0, 4); }}},
      {"fig7a", {"gain vs N_t, rho=0dB, T=2", [](const PresetBuilder& b, ExperimentPreset& p) { b.antenna_figure(p, 0.0, 2); }}},
      {"fig7b", {"gain vs N_t, rho=20dB, T=4", [](const PresetBuilder& b, ExperimentPreset& p) { b.antenna_figure(p, 20.0, 4); }}},
      {"fig8",
       {"SNR-based closed loop at 3 and 10 km/h, T=2, a=0.9, B=6, N_t=64",
        [](const PresetBuilder& b, ExperimentPreset& p) {
          for (double rho_db : {0.0, 20.0}) {
            for (double speed : {3.0, 10.0}) {
              SimConfig cfg = b.config(64, 2, rho_db, 0.9, K::kClosedLoopMemorySnr);
              cfg.eta = EtaSource::doppler(speed);
              p.runs.push_back(cfg);
            }
          }
        }}},
  };
  return table;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, entry] : recipes()) out.push_back(name);
    return out;
  }();
  return names;
}

ExperimentPreset make_preset(std::string_view name, const PresetOptions& options) {
  const auto found = recipes().find(name);
  if (found == recipes().end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  ExperimentPreset preset;
  preset.name = found->first;
  preset.description = found->second.first;
  found->second.second(PresetBuilder(options), preset);
  for (const auto& cfg : preset.runs) cfg.validate();
  return preset;
}

}  // namespace fddtrain::cli
