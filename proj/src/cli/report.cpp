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

#include "fddtrain/cli/report.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "fddtrain/channel.hpp"
#include "fddtrain/cli/presets.hpp"
#include "fddtrain/errors.hpp"
#include "fddtrain/estimation.hpp"

namespace fddtrain::cli {

namespace {

int csv_bits(const SimConfig& cfg) {
  if (uses_codebook(cfg.strategy)) return cfg.bits;
  return kUnboundedFeedback;
}

template <typename T>
T get_as(const nlohmann::json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

int get_int(const nlohmann::json& value, const std::string& key) {
  if (!value.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  return value.get<int>();
}

std::uint64_t get_seed(const nlohmann::json& value, const std::string& key) {
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

double get_number(const nlohmann::json& value, const std::string& key) {
  if (!value.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return value.get<double>();
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string csv_header() {
  return "strategy,block,n_tx,t_len,rho_db,a,eta,bits,gamma_db,gamma_stderr,mse,mse_stderr,samples";
}

void write_csv(std::ostream& out, const std::vector<RunResult>& results) {
  out << csv_header() << '\n';
  for (const auto& r : results) {
    const SimConfig& c = r.config;
    const std::string prefix = std::string(to_string(c.strategy)) + ",";
    const std::string shared = std::to_string(c.n_tx) + "," + std::to_string(c.t_len) + "," +
                               format_number(linear_to_db(c.rho)) + "," + format_number(c.a) + "," +
                               format_number(c.eta.resolve()) + "," + std::to_string(csv_bits(c)) + ",";
    for (const auto& m : r.blocks) {
      out << prefix << m.block_index << ',' << shared << format_number(m.mean_gamma_db) << ','
          << format_number(m.gamma_stderr_db) << ',' << format_number(m.mean_mse) << ','
          << format_number(m.mse_stderr) << ',' << m.samples << '\n';
    }
  }
}

std::string to_csv(const std::vector<RunResult>& results) {
  std::ostringstream out;
  write_csv(out, results);
  return out.str();
}

void write_bounds_csv(std::ostream& out, const std::vector<SimConfig>& runs) {
  out << "n_tx,t_len,rho_db,a,snr_upper_bound_db,ceiling_bound_db\n";
  std::set<std::tuple<double, int, int, double>> seen;
  for (const auto& c : runs) {
    if (!seen.insert({c.a, c.n_tx, c.t_len, c.rho}).second) continue;
    const CMatrix r = exponential_correlation(c.n_tx, c.a);
    const double upper = snr_upper_bound_ss(r, c.t_len, c.rho);
    out << c.n_tx << ',' << c.t_len << ',' << format_number(linear_to_db(c.rho)) << ',' << format_number(c.a) << ','
        << format_number(linear_to_db(upper)) << ',';
    if (c.a > 0.0) out << format_number(linear_to_db(snr_ceiling_bound_exp(c.t_len, c.a)));
    out << '\n';
  }
}

nlohmann::ordered_json config_to_json(const SimConfig& cfg) {
  nlohmann::ordered_json j;
  j["strategy"] = std::string(to_string(cfg.strategy));
  j["n-tx"] = cfg.n_tx;
  j["t-len"] = cfg.t_len;
  j["rho"] = cfg.rho;
  j["a"] = cfg.a;
  if (cfg.eta.eta) {
    j["eta"] = *cfg.eta.eta;
  } else {
    j["speed-kmh"] = cfg.eta.speed_kmh;
    j["carrier-hz"] = cfg.eta.carrier_hz;
    j["block-s"] = cfg.eta.block_s;
  }
  j["bits"] = cfg.bits;
  j["blocks"] = cfg.blocks_per_iteration;
  j["iterations"] = cfg.iterations;
  j["seed"] = cfg.master_seed;
  j["codebook-seed"] = cfg.codebook_seed;
  j["codebook-budget"] = cfg.codebook_budget;
  j["shuffle"] = cfg.shuffle_codebook;
  j["convention"] = std::string(to_string(cfg.convention));
  return j;
}

SimConfig apply_config_json(const nlohmann::json& object, SimConfig base, std::optional<std::string>* codebook_path) {
  if (!object.is_object()) throw ConfigError("config must be a flat JSON object");
  if (object.contains("rho") && object.contains("rho-db")) throw ConfigError("config sets both rho and rho-db");
  if (object.contains("eta") && object.contains("speed-kmh")) throw ConfigError("config sets both eta and speed-kmh");
  SimConfig cfg = std::move(base);
  for (const auto& [key, value] : object.items()) {
    if (key == "strategy") {
      cfg.strategy = parse_strategy(get_as<std::string>(value, key));
    } else if (key == "n-tx") {
      cfg.n_tx = get_int(value, key);
    } else if (key == "t-len") {
      cfg.t_len = get_int(value, key);
    } else if (key == "rho") {
      cfg.rho = get_number(value, key);
    } else if (key == "rho-db") {
      cfg.rho = db_to_linear(get_number(value, key));
    } else if (key == "a") {
      cfg.a = get_number(value, key);
    } else if (key == "eta") {
      cfg.eta = EtaSource::direct(get_number(value, key));
    } else if (key == "speed-kmh") {
      cfg.eta.eta.reset();
      cfg.eta.speed_kmh = get_number(value, key);
    } else if (key == "carrier-hz") {
      cfg.eta.carrier_hz = get_number(value, key);
    } else if (key == "block-s") {
      cfg.eta.block_s = get_number(value, key);
    } else if (key == "bits") {
      cfg.bits = get_int(value, key);
    } else if (key == "blocks") {
      cfg.blocks_per_iteration = get_int(value, key);
    } else if (key == "iterations") {
      cfg.iterations = get_int(value, key);
    } else if (key == "seed") {
      cfg.master_seed = get_seed(value, key);
    } else if (key == "codebook-seed") {
      cfg.codebook_seed = get_seed(value, key);
    } else if (key == "codebook-budget") {
      cfg.codebook_budget = get_int(value, key);
    } else if (key == "shuffle") {
      cfg.shuffle_codebook = get_as<bool>(value, key);
    } else if (key == "workers") {
      cfg.workers = get_int(value, key);
    } else if (key == "convention") {
      cfg.convention = parse_moment_convention(get_as<std::string>(value, key));
    } else if (key == "codebook") {
      if (codebook_path == nullptr) throw ConfigError("config key 'codebook' is not accepted here");
      *codebook_path = get_as<std::string>(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

nlohmann::ordered_json manifest_json(const std::vector<RunResult>& results, const ManifestInfo& info) {
  nlohmann::ordered_json j;
  j["tool"] = "fddtrain";
  j["version"] = std::string(kToolVersion);
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["command"] = info.command;
  if (!info.preset.empty()) j["preset"] = info.preset;
  j["workers"] = info.workers;
  j["wall_time_s"] = info.wall_time_s;
  j["outputs"] = info.outputs;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json entry;
    entry["config"] = config_to_json(r.config);
    entry["eta_resolved"] = r.config.eta.resolve();
    if (r.config.codebook && uses_codebook(r.config.strategy)) {
      const double d = r.config.codebook->min_chordal;
      entry["codebook_min_chordal"] = std::isfinite(d) ? nlohmann::ordered_json(d) : nlohmann::ordered_json(nullptr);
    }
    std::size_t fallbacks = 0;
    for (const auto& m : r.blocks) fallbacks += m.fallbacks;
    entry["beamformer_fallbacks"] = fallbacks;
    runs.push_back(std::move(entry));
  }
  j["runs"] = std::move(runs);
  return j;
}

}  // namespace fddtrain::cli
