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

#include "fddtrain/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "fddtrain/cli/presets.hpp"
#include "fddtrain/cli/report.hpp"
#include "fddtrain/cli/verify.hpp"
#include "fddtrain/codebook.hpp"
#include "fddtrain/errors.hpp"
#include "fddtrain/simulator.hpp"

namespace fddtrain::cli {

namespace {

// Flags shared by run and sweep. Unset optionals leave the config-file (or
// built-in default) value alone.
struct ConfigFlags {
  std::optional<std::string> config_path;
  std::optional<int> n_tx;
  std::optional<int> t_len;
  std::optional<double> rho_db;
  std::optional<double> rho;
  std::optional<double> a;
  std::optional<double> eta;
  std::optional<double> speed_kmh;
  std::optional<double> carrier_hz;
  std::optional<double> block_s;
  std::optional<int> bits;
  std::optional<int> blocks;
  std::optional<int> iterations;
  std::vector<std::string> strategies;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> codebook_path;
  std::optional<int> codebook_budget;
  std::optional<std::uint64_t> codebook_seed;
  bool no_shuffle = false;
  std::optional<int> workers;
  std::optional<std::string> convention;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--config", f.config_path, "Flat JSON object of flag-name keys; explicit flags win");
  app->add_option("--n-tx", f.n_tx, "Transmit antennas N_t");
  app->add_option("--t-len", f.t_len, "Training length T (channel uses)");
  auto* rho_db = app->add_option("--rho-db", f.rho_db, "Per-pilot SNR in dB");
  app->add_option("--rho", f.rho, "Per-pilot SNR, linear")->excludes(rho_db);
  auto* eta = app->add_option("--eta", f.eta, "Temporal correlation coefficient");
  app->add_option("--speed-kmh", f.speed_kmh, "User speed for the Jakes coefficient")->excludes(eta);
  app->add_option("--carrier-hz", f.carrier_hz, "Carrier frequency for the Jakes coefficient")->excludes(eta);
  app->add_option("--block-s", f.block_s, "Block interval for the Jakes coefficient")->excludes(eta);
  app->add_option("--a", f.a, "Exponential spatial correlation in [0, 1)");
  app->add_option("--bits", f.bits, "Codebook size exponent B");
  app->add_option("--blocks", f.blocks, "Fading blocks per iteration");
  app->add_option("--iterations", f.iterations, "Monte Carlo iterations");
  app->add_option("--strategy", f.strategies, "ol-ss, ol-mem, cl-mem-mse, cl-mem-snr, cl-ss-full, cl-mem-full")
      ->delimiter(',');
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--codebook", f.codebook_path, "Codebook file instead of a designed one");
  app->add_option("--codebook-budget", f.codebook_budget, "Refinement steps per restart when designing");
  app->add_option("--codebook-seed", f.codebook_seed, "Seed for codebook design (defaults to --seed)");
  app->add_flag("--no-shuffle", f.no_shuffle, "Keep the codebook order fixed across iterations");
  app->add_option("--workers", f.workers, "Worker threads (0: FDDTRAIN_WORKERS or all cores)");
  app->add_option("--convention", f.convention, "printed, printed-squared-trace or circular-gaussian");
}

bool has_model_flags(const ConfigFlags& f) {
  return f.config_path || f.n_tx || f.t_len || f.rho_db || f.rho || f.a || f.eta || f.speed_kmh || f.carrier_hz ||
         f.block_s || f.bits || f.blocks || !f.strategies.empty() || f.codebook_path || f.codebook_seed ||
         f.no_shuffle || f.convention;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

// Defaults, then the config file, then explicit flags. Returns one config
// per requested strategy.
std::vector<SimConfig> resolve_configs(const ConfigFlags& f) {
  SimConfig cfg;
  cfg.n_tx = 16;
  cfg.t_len = 2;
  cfg.rho = 1.0;
  cfg.a = 0.9;
  cfg.eta = EtaSource::doppler(3.0);
  cfg.bits = 6;
  bool strategy_set = false;
  std::optional<std::string> codebook_path;
  if (f.config_path) {
    const nlohmann::json object = read_json_file(*f.config_path);
    strategy_set = object.is_object() && object.contains("strategy");
    const bool codebook_seed_set = object.is_object() && object.contains("codebook-seed");
    cfg = apply_config_json(object, cfg, &codebook_path);
    if (!codebook_seed_set) cfg.codebook_seed = cfg.master_seed;
  }
  if (f.n_tx) cfg.n_tx = *f.n_tx;
  if (f.t_len) cfg.t_len = *f.t_len;
  if (f.rho_db) cfg.rho = db_to_linear(*f.rho_db);
  if (f.rho) cfg.rho = *f.rho;
  if (f.a) cfg.a = *f.a;
  if (f.eta) cfg.eta = EtaSource::direct(*f.eta);
  if (f.speed_kmh || f.carrier_hz || f.block_s) {
    if (cfg.eta.eta) cfg.eta = EtaSource::doppler(3.0);
    if (f.speed_kmh) cfg.eta.speed_kmh = *f.speed_kmh;
    if (f.carrier_hz) cfg.eta.carrier_hz = *f.carrier_hz;
    if (f.block_s) cfg.eta.block_s = *f.block_s;
  }
  if (f.bits) cfg.bits = *f.bits;
  if (f.blocks) cfg.blocks_per_iteration = *f.blocks;
  if (f.iterations) cfg.iterations = *f.iterations;
  if (f.seed) {
    cfg.master_seed = *f.seed;
    cfg.codebook_seed = *f.seed;
  }
  if (f.codebook_seed) cfg.codebook_seed = *f.codebook_seed;
  if (f.codebook_budget) cfg.codebook_budget = *f.codebook_budget;
  if (f.no_shuffle) cfg.shuffle_codebook = false;
  if (f.workers) cfg.workers = *f.workers;
  if (f.convention) cfg.convention = parse_moment_convention(*f.convention);
  if (f.codebook_path) codebook_path = f.codebook_path;
  if (codebook_path) {
    const TrainingCodebook cb = load_codebook(*codebook_path);
    if (!f.bits) cfg.bits = cb.bits;
    cfg.codebook = std::make_shared<const TrainingCodebook>(cb);
  }

  std::vector<SimConfig> configs;
  if (!f.strategies.empty()) {
    for (const auto& name : f.strategies) {
      SimConfig c = cfg;
      c.strategy = parse_strategy(name);
      configs.push_back(std::move(c));
    }
  } else if (strategy_set) {
    configs.push_back(cfg);
  } else {
    throw ConfigError("no strategy given (use --strategy, --config or --preset)");
  }
  for (const auto& c : configs) c.validate();
  return configs;
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
  const std::string ext = ".csv";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size()) + suffix;
  }
  return out + suffix;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << content;
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

struct OutputFlags {
  std::string out = "results.csv";
  std::optional<std::string> manifest;
};

void add_output_flags(CLI::App* app, OutputFlags& o) {
  app->add_option("-o,--out", o.out, "CSV output path, '-' for stdout")->capture_default_str();
  app->add_option("--manifest", o.manifest, "Manifest path (default: <out>.manifest.json)");
}

// Designs codebooks up front so the manifest can describe them. Runs that
// differ only in strategy or rho share one design.
class CodebookCache {
 public:
  void attach(SimConfig& c, std::ostream& err) {
    if (!uses_codebook(c.strategy)) return;
    if (c.codebook) {
      c.codebook = resolve_codebook(c);
      return;
    }
    const auto key = std::make_tuple(c.n_tx, c.t_len, c.bits, c.codebook_budget, c.codebook_seed);
    auto found = designed_.find(key);
    if (found == designed_.end()) {
      err << "designing codebook N_t=" << c.n_tx << " T=" << c.t_len << " B=" << c.bits << "\n";
      found = designed_.emplace(key, resolve_codebook(c)).first;
    }
    c.codebook = found->second;
    c.codebook = resolve_codebook(c);  // rescales when rho differs
  }

 private:
  std::map<std::tuple<int, int, int, int, std::uint64_t>, std::shared_ptr<const TrainingCodebook>> designed_;
};

std::vector<RunResult> execute(std::vector<SimConfig> configs, std::ostream& err) {
  std::vector<RunResult> results;
  results.reserve(configs.size());
  CodebookCache cache;
  for (size_t k = 0; k < configs.size(); ++k) {
    SimConfig& c = configs[k];
    err << "[" << (k + 1) << "/" << configs.size() << "] " << to_string(c.strategy) << " N_t=" << c.n_tx
        << " T=" << c.t_len << " rho=" << format_number(linear_to_db(c.rho)) << "dB a=" << format_number(c.a)
        << " B=" << c.bits << "\n";
    cache.attach(c, err);
    results.push_back({c, run(c)});
  }
  return results;
}

void emit(const std::vector<RunResult>& results, const OutputFlags& o, ManifestInfo info,
          const std::vector<SimConfig>* bounds_for, std::ostream& out) {
  const std::string csv = to_csv(results);
  if (o.out == "-") {
    out << csv;
  } else {
    write_file(o.out, csv);
    info.outputs.push_back(o.out);
  }
  if (bounds_for != nullptr) {
    std::ostringstream bounds;
    write_bounds_csv(bounds, *bounds_for);
    const std::string path = o.out == "-" ? "bounds.csv" : sibling_path(o.out, ".bounds.csv");
    write_file(path, bounds.str());
    info.outputs.push_back(path);
  }
  std::optional<std::string> manifest = o.manifest;
  if (!manifest && o.out != "-") manifest = sibling_path(o.out, ".manifest.json");
  if (manifest) write_file(*manifest, manifest_json(results, info).dump(2) + "\n");
}

std::string command_line(int argc, const char* const* argv) {
  std::string line;
  for (int k = 0; k < argc; ++k) line += (k ? " " : "") + std::string(argv[k]);
  return line;
}

int cmd_run(const ConfigFlags& flags, const std::optional<std::string>& preset_name, const OutputFlags& outputs,
            const std::string& command, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<SimConfig> configs;
  ExperimentPreset preset;
  if (preset_name) {
    if (has_model_flags(flags)) {
      throw ConfigError("--preset accepts only --iterations, --seed, --workers and --codebook-budget overrides");
    }
    PresetOptions po;
    if (flags.iterations) po.iterations = *flags.iterations;
    if (flags.seed) po.seed = *flags.seed;
    if (flags.workers) po.workers = *flags.workers;
    if (flags.codebook_budget) po.codebook_budget = *flags.codebook_budget;
    preset = make_preset(*preset_name, po);
    configs = preset.runs;
  } else {
    configs = resolve_configs(flags);
  }
  const std::vector<RunResult> results = execute(configs, err);
  ManifestInfo info;
  info.command = command;
  info.preset = preset_name.value_or("");
  info.workers = configs.empty() ? 1 : resolve_workers(configs.front());
  info.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(results, outputs, info, preset.with_bounds ? &configs : nullptr, out);
  return kExitOk;
}

int cmd_sweep(const ConfigFlags& flags, const std::string& axis_name, const std::vector<std::string>& raw_values,
              const OutputFlags& outputs, const std::string& command, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const SweepAxis axis = parse_sweep_axis(axis_name);
  ConfigFlags base_flags = flags;
  if (axis == SweepAxis::kStrategy && base_flags.strategies.empty()) base_flags.strategies = {raw_values.empty() ? "ol-mem" : raw_values.front()};
  const std::vector<SimConfig> bases = resolve_configs(base_flags);
  if (bases.size() != 1 && axis != SweepAxis::kStrategy) throw ConfigError("sweep takes a single --strategy");

  std::vector<SweepValue> values;
  for (const auto& v : raw_values) {
    if (axis == SweepAxis::kStrategy) {
      values.emplace_back(parse_strategy(v));
      continue;
    }
    double number = 0.0;
    try {
      size_t used = 0;
      number = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw ConfigError("sweep value '" + v + "' is not a number");
    }
    // rho is given in dB on the command line, like --rho-db.
    values.emplace_back(axis == SweepAxis::kRho ? db_to_linear(number) : number);
  }

  err << "sweeping " << to_string(axis) << " over " << values.size() << " values\n";
  std::vector<RunResult> results;
  for (auto& point : run_sweep(bases.front(), axis, values)) results.push_back({point.config, std::move(point.blocks)});
  ManifestInfo info;
  info.command = command;
  info.workers = resolve_workers(bases.front());
  info.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(results, outputs, info, nullptr, out);
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& only, bool strict, int workers, std::ostream& out) {
  VerifyOptions options;
  options.strict = strict;
  options.workers = workers;
  const std::vector<std::string> names = only.empty() ? check_names() : only;
  for (const auto& n : names) {
    bool known = false;
    for (const auto& k : check_names()) known = known || k == n;
    if (!known) run_check(n, options);  // throws ConfigError with the list of names
  }
  bool failed = false;
  int warnings = 0;
  for (const auto& name : names) {
    const CheckResult r = run_check(name, options);
    out << to_string(r.status) << "  " << r.name << " (" << format_number(r.seconds) << " s): " << r.detail << "\n";
    out.flush();
    failed = failed || r.status == CheckStatus::kFail;
    warnings += r.status == CheckStatus::kWarn ? 1 : 0;
  }
  out << (failed ? "verify: FAILED" : "verify: ok") << " (" << names.size() << " checks, " << warnings
      << " warnings)\n";
  return failed ? kExitRuntime : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Downlink training simulator for FDD massive MIMO links", "fddtrain"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  ConfigFlags run_flags;
  OutputFlags run_outputs;
  std::optional<std::string> preset;
  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one or more strategies, or a named figure preset");
  add_config_flags(run_cmd, run_flags);
  add_output_flags(run_cmd, run_outputs);
  run_cmd->add_option("--preset", preset, "fig1, fig3, fig4a..fig4d, fig5a..fig5d, fig6a, fig6b, fig7a, fig7b, fig8");

  ConfigFlags sweep_flags;
  OutputFlags sweep_outputs;
  std::string axis;
  std::vector<std::string> sweep_values;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run one configuration across values of a single parameter");
  add_config_flags(sweep_cmd, sweep_flags);
  add_output_flags(sweep_cmd, sweep_outputs);
  sweep_cmd->add_option("--axis", axis, "n_tx, rho (dB), a, t_len, bits, strategy or eta")->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")->delimiter(',')->required();

  CLI::App* cb_cmd = app.add_subcommand("codebook", "Design or inspect training codebooks");
  cb_cmd->require_subcommand(1);
  int cb_n_tx = 16;
  int cb_t_len = 2;
  int cb_bits = 6;
  double cb_rho_db = 0.0;
  std::uint64_t cb_seed = 1;
  int cb_budget = 200;
  std::string cb_out;
  CLI::App* design_cmd = cb_cmd->add_subcommand("design", "Grassmannian packing design");
  design_cmd->add_option("--n-tx", cb_n_tx, "Transmit antennas")->capture_default_str();
  design_cmd->add_option("--t-len", cb_t_len, "Training length")->capture_default_str();
  design_cmd->add_option("--bits", cb_bits, "log2 of the codebook size")->capture_default_str();
  design_cmd->add_option("--rho-db", cb_rho_db, "Per-pilot SNR in dB stored with the entries")->capture_default_str();
  design_cmd->add_option("--seed", cb_seed, "Design seed")->capture_default_str();
  design_cmd->add_option("--budget", cb_budget, "Refinement steps per restart")->capture_default_str();
  design_cmd->add_option("-o,--out", cb_out, "Output file")->required();
  std::string inspect_path;
  CLI::App* inspect_cmd = cb_cmd->add_subcommand("inspect", "Validate a codebook file and print its summary");
  inspect_cmd->add_option("file", inspect_path, "Codebook file")->required();

  std::vector<std::string> only;
  bool strict = false;
  bool list = false;
  int verify_workers = 0;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the analytic oracle checks");
  verify_cmd->add_option("--only", only, "Run just these checks")->delimiter(',');
  verify_cmd->add_flag("--strict", strict, "Ten times tighter deterministic tolerances");
  verify_cmd->add_flag("--list", list, "List check names");
  verify_cmd->add_option("--workers", verify_workers, "Worker threads for simulation checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string command = command_line(argc, argv);
  try {
    if (*run_cmd) return cmd_run(run_flags, preset, run_outputs, command, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, axis, sweep_values, sweep_outputs, command, out, err);
    if (*design_cmd) {
      const TrainingCodebook cb = design_gsp(cb_n_tx, cb_t_len, cb_bits, db_to_linear(cb_rho_db), cb_budget, cb_seed);
      save_codebook(cb, cb_out);
      out << "wrote " << cb_out << ": n_tx=" << cb.n_tx << " t_len=" << cb.t_len << " bits=" << cb.bits
          << " min_chordal=" << format_number(cb.min_chordal) << "\n";
      return kExitOk;
    }
    if (*inspect_cmd) {
      try {
        const TrainingCodebook cb = load_codebook(inspect_path);
        out << "n_tx=" << cb.n_tx << "\nt_len=" << cb.t_len << "\nbits=" << cb.bits << "\nentries=" << cb.size()
            << "\nrho=" << format_number(cb.rho) << "\nseed=" << cb.seed
            << "\nmin_chordal=" << format_number(cb.min_chordal) << "\nvalid=yes\n";
        return kExitOk;
      } catch (const std::exception& e) {
        err << "error: " << inspect_path << ": " << e.what() << "\n";
        return kExitRuntime;
      }
    }
    if (*verify_cmd) {
      if (list) {
        for (const auto& n : check_names()) out << n << "\n";
        return kExitOk;
      }
      return cmd_verify(only, strict, verify_workers, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace fddtrain::cli
