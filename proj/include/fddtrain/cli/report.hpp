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

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fddtrain/simulator.hpp"
#include "json.hpp"

namespace fddtrain::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";
/// Bumped whenever a CSV column is added, removed, renamed or reordered.
inline constexpr int kCsvSchemaVersion = 1;

struct RunResult {
  SimConfig config;
  std::vector<BlockMetrics> blocks;
};

/// 12 significant digits, '.' separator, independent of the global locale.
std::string format_number(double value);

/// strategy,block,n_tx,t_len,rho_db,a,eta,bits,gamma_db,gamma_stderr,mse,mse_stderr,samples
std::string csv_header();
/// The bits column holds B for codebook strategies and -1 for unbounded feedback.
void write_csv(std::ostream& out, const std::vector<RunResult>& results);
std::string to_csv(const std::vector<RunResult>& results);

/// n_tx,t_len,rho_db,a,snr_upper_bound_db,ceiling_bound_db for each distinct
/// (n_tx, t_len, rho, a) among the runs. The ceiling column is empty at a=0.
void write_bounds_csv(std::ostream& out, const std::vector<SimConfig>& runs);

/// Flat object whose keys mirror the command-line flag names.
nlohmann::ordered_json config_to_json(const SimConfig& cfg);

/// Applies a flat key/value object on top of `base`. A "codebook" key is
/// returned through `codebook_path` rather than loaded. Throws ConfigError on
/// unknown keys or ill-typed values.
SimConfig apply_config_json(const nlohmann::json& object, SimConfig base,
                            std::optional<std::string>* codebook_path = nullptr);

struct ManifestInfo {
  std::string command;
  std::string preset;  // empty for explicit runs
  double wall_time_s = 0.0;
  int workers = 1;
  std::vector<std::string> outputs;
};

nlohmann::ordered_json manifest_json(const std::vector<RunResult>& results, const ManifestInfo& info);

}  // namespace fddtrain::cli
