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

#include <string>
#include <string_view>
#include <vector>

namespace fddtrain::cli {

enum class CheckStatus { kPass, kWarn, kFail };

std::string_view to_string(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::kFail;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  /// Deterministic tolerances ten times tighter. Statistical thresholds
  /// (multiples of a standard error) are unchanged.
  bool strict = false;
  int workers = 0;
};

/// jakes, closed-form, lemma4, orderings, bounds, tracking, qp, codebook,
/// determinism
const std::vector<std::string>& check_names();

/// Throws ConfigError for unknown names.
CheckResult run_check(std::string_view name, const VerifyOptions& options = {});

}  // namespace fddtrain::cli
