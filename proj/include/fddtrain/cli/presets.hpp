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
#include <string>
#include <string_view>
#include <vector>

#include "fddtrain/simulator.hpp"

namespace fddtrain::cli {

double db_to_linear(double db);
double linear_to_db(double linear);

/// Knobs a user may change on any preset without altering what it measures.
struct PresetOptions {
  int iterations = 10000;
  std::uint64_t seed = 1;
  int workers = 0;
  int codebook_budget = 200;
};

/// A named bundle of simulation runs that together produce one figure's
/// curves.
struct ExperimentPreset {
  std::string name;
  std::string description;
  std::vector<SimConfig> runs;
  /// Also emit the single-shot SNR upper bounds per (n_tx, a).
  bool with_bounds = false;
};

const std::vector<std::string>& preset_names();

/// Throws ConfigError for unknown names.
ExperimentPreset make_preset(std::string_view name, const PresetOptions& options = {});

}  // namespace fddtrain::cli
