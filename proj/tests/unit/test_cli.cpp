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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fddtrain/cli/commands.hpp"
#include "fddtrain/cli/presets.hpp"
#include "fddtrain/cli/report.hpp"
#include "fddtrain/cli/verify.hpp"
#include "fddtrain/errors.hpp"
#include "json.hpp"

using namespace fddtrain;
using namespace fddtrain::cli;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fddtrain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "fddtrain_unit_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

size_t count_lines(const std::string& s) {
  size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("preset table") {
  const std::set<std::string> names(preset_names().begin(), preset_names().end());
  const std::set<std::string> expected = {"fig1",  "fig3",  "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b",
                                          "fig5c", "fig5d", "fig6a", "fig6b", "fig7a", "fig7b", "fig8"};
  CHECK(names == expected);

  const auto fig1 = make_preset("fig1");
  CHECK(fig1.with_bounds);
  CHECK(fig1.runs.size() == 30u);
  for (const auto& r : fig1.runs) {
    CHECK(r.t_len == 4);
    CHECK(r.rho == doctest::Approx(100.0));
  }
  CHECK(make_preset("fig3").runs.size() == 8u);
  const auto fig4b = make_preset("fig4b");
  CHECK(fig4b.runs.size() == 10u);
  int full_length = 0;
  for (const auto& r : fig4b.runs) {
    CHECK(r.n_tx == 16);
    CHECK(r.rho == doctest::Approx(1.0));
    CHECK(r.bits == 6);
    full_length += r.t_len == 16 && r.strategy == StrategyKind::kOpenLoopSingleShot;
  }
  CHECK(full_length == 2);
  CHECK(make_preset("fig5d").runs.front().n_tx == 64);
  CHECK(make_preset("fig6a").runs.size() == 8u);
  CHECK(make_preset("fig7b").runs.size() == 40u);
  const auto fig8 = make_preset("fig8");
  REQUIRE(fig8.runs.size() == 4u);
  CHECK(fig8.runs[1].eta.resolve() == doctest::Approx(0.8721).epsilon(1e-3));

  PresetOptions opts;
  opts.iterations = 7;
  opts.seed = 99;
  opts.workers = 2;
  for (const auto& r : make_preset("fig3", opts).runs) {
    CHECK(r.iterations == 7);
    CHECK(r.master_seed == 99u);
    CHECK(r.workers == 2);
  }
  CHECK_THROWS_AS(make_preset("fig2"), ConfigError);
}

TEST_CASE("number formatting and CSV layout") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2.0) == "-2");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(csv_header() == "strategy,block,n_tx,t_len,rho_db,a,eta,bits,gamma_db,gamma_stderr,mse,mse_stderr,samples");

  SimConfig cfg;
  cfg.strategy = StrategyKind::kClosedLoopMemoryFull;
  cfg.rho = 100.0;
  cfg.eta = EtaSource::direct(0.5);
  BlockMetrics m;
  m.block_index = 3;
  m.mean_gamma_db = 12.5;
  m.samples = 10;
  const std::string csv = to_csv({RunResult{cfg, {m}}});
  CHECK(csv.rfind(csv_header() + "\n", 0) == 0);
  CHECK(csv.find("cl-mem-full,3,16,2,20,0.9,0.5,-1,12.5,") != std::string::npos);
}

TEST_CASE("bounds CSV") {
  std::vector<SimConfig> runs(2);
  runs[0].a = 0.0;
  runs[1].a = 0.5;
  std::ostringstream out;
  write_bounds_csv(out, runs);
  std::istringstream lines(out.str());
  std::string header;
  std::string zero;
  std::string half;
  std::getline(lines, header);
  std::getline(lines, zero);
  std::getline(lines, half);
  CHECK(header == "n_tx,t_len,rho_db,a,snr_upper_bound_db,ceiling_bound_db");
  CHECK(zero.back() == ',');
  CHECK(half.back() != ',');
}

TEST_CASE("config JSON round trip") {
  SimConfig cfg;
  cfg.n_tx = 12;
  cfg.t_len = 3;
  cfg.rho = 31.5;
  cfg.a = 0.25;
  cfg.eta = EtaSource::doppler(7.0, 2e9, 1e-3);
  cfg.bits = 4;
  cfg.iterations = 77;
  cfg.strategy = StrategyKind::kClosedLoopMemorySnr;
  cfg.master_seed = 5;
  cfg.codebook_seed = 6;
  cfg.shuffle_codebook = false;
  cfg.convention = MomentConvention::kCircularGaussian;
  const auto json = config_to_json(cfg);
  const SimConfig back = apply_config_json(nlohmann::json::parse(json.dump()), SimConfig{});
  CHECK(config_to_json(back).dump() == json.dump());

  std::optional<std::string> path;
  const SimConfig with_db = apply_config_json(nlohmann::json{{"rho-db", 10.0}, {"codebook", "cb.json"}}, SimConfig{}, &path);
  CHECK(with_db.rho == doctest::Approx(10.0));
  CHECK(path == "cb.json");
  CHECK_THROWS_AS(apply_config_json(nlohmann::json{{"n_tx", 4}}, SimConfig{}), ConfigError);
  CHECK_THROWS_AS(apply_config_json(nlohmann::json{{"n-tx", "four"}}, SimConfig{}), ConfigError);
  CHECK_THROWS_AS(apply_config_json(nlohmann::json{{"strategy", "nope"}}, SimConfig{}), ConfigError);
}

TEST_CASE("run writes CSV and manifest") {
  const auto out = scratch("run.csv");
  const CliRun r = invoke({"run", "--n-tx", "4", "--t-len", "1", "--iterations", "20", "--blocks", "3", "--strategy",
                        "ol-mem,cl-mem-mse", "--bits", "2", "--codebook-budget", "5", "--workers", "1", "-o", out.string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(out);
  CHECK(count_lines(csv) == 7u);
  const auto manifest = nlohmann::json::parse(slurp(scratch("run.manifest.json")));
  CHECK(manifest.at("csv_schema_version") == kCsvSchemaVersion);
  CHECK(manifest.at("runs").size() == 2u);

  // Same flags through a config file, overridden by one explicit flag.
  const auto cfg_path = scratch("cfg.json");
  std::ofstream(cfg_path) << R"({"n-tx": 4, "t-len": 1, "iterations": 20, "blocks": 3, "bits": 2,
                                 "codebook-budget": 5, "strategy": "cl-mem-mse", "seed": 3})";
  const auto out2 = scratch("run2.csv");
  REQUIRE(invoke({"run", "--config", cfg_path.string(), "--seed", "1", "--workers", "1", "-o", out2.string()}).code == kExitOk);
  const std::string csv2 = slurp(out2);
  CHECK(csv.find(csv2.substr(csv_header().size() + 1)) != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"run", "--bogus"}).code == kExitUsage);
  CHECK(invoke({"run", "--n-tx", "4", "--t-len", "5", "--iterations", "2", "-o", scratch("bad.csv").string()}).code == kExitUsage);
  CHECK(invoke({"run", "--preset", "fig1", "--n-tx", "4"}).code == kExitUsage);
  CHECK(invoke({"sweep", "--axis", "speed", "--values", "1,2"}).code == kExitUsage);
  CHECK(invoke({"verify", "--only", "nope"}).code == kExitUsage);
  const CliRun list = invoke({"verify", "--list"});
  CHECK(list.code == kExitOk);
  for (const auto& name : check_names()) CHECK(list.out.find(name) != std::string::npos);

  const auto missing = invoke({"codebook", "inspect", "/nonexistent/cb.json"});
  CHECK(missing.code == kExitRuntime);
  CHECK(missing.err.rfind("error: /nonexistent/cb.json: ", 0) == 0);
}

TEST_CASE("codebook design is deterministic and inspect rejects tampering") {
  const auto a = scratch("a.json");
  const auto b = scratch("b.json");
  const std::vector<std::string> common = {"codebook", "design", "--n-tx", "6", "--t-len", "2", "--bits", "3", "--budget", "10", "--seed", "8"};
  auto args = common;
  args.insert(args.end(), {"-o", a.string()});
  REQUIRE(invoke(args).code == kExitOk);
  args = common;
  args.insert(args.end(), {"-o", b.string()});
  REQUIRE(invoke(args).code == kExitOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(invoke({"codebook", "inspect", a.string()}).code == kExitOk);

  auto doc = nlohmann::json::parse(slurp(a));
  doc["entries"][0][0][0][1] = doc["entries"][0][0][0][1].get<double>() + 0.05;
  std::ofstream(b) << doc.dump();
  const CliRun tampered = invoke({"codebook", "inspect", b.string()});
  CHECK(tampered.code == kExitRuntime);
  CHECK(tampered.err.find("error: ") == 0);
}

TEST_CASE("verify checks run individually") {
  VerifyOptions opts;
  opts.workers = 1;
  for (const char* name : {"jakes", "closed-form", "orderings"}) {
    const CheckResult r = run_check(name, opts);
    CHECK(r.name == name);
    CHECK(r.status == CheckStatus::kPass);
  }
  CHECK_THROWS_AS(run_check("nope"), ConfigError);
}
