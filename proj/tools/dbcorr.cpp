// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// dbcorr: simulate, bound and verify correlation detection and alignment of
// Gaussian databases.
//
// Settings resolve as command defaults, then --config, then flags.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dbcorr/config.hpp"
#include "dbcorr/errors.hpp"
#include "dbcorr/runner.hpp"

namespace {

struct Flags {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed, trials, n, d, k_star;
  std::optional<std::string> out, format, threshold, sampler, axis, grid;
  std::optional<unsigned> threads;
  std::optional<double> rho, risk, margin, epsilon_d;
  bool inject_fault = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON experiment config");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--trials", f.trials, "Monte-Carlo trials");
  sub->add_option("--out", f.out, "output file (default: stdout)");
  sub->add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", f.threads, "worker threads (0: all cores)");
}

void add_problem(CLI::App* sub, Flags& f) {
  sub->add_option("--n", f.n, "rows per database");
  sub->add_option("--d", f.d, "features per row");
  sub->add_option("--rho", f.rho, "correlation coefficient");
}

nlohmann::json overrides(const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (f.seed) j["seed"] = *f.seed;
  if (f.trials) j["trials"] = *f.trials;
  if (f.out) j["output"] = *f.out;
  if (f.format) j["format"] = *f.format;
  if (f.threads) j["threads"] = *f.threads;
  if (f.n) j["n"] = *f.n;
  if (f.d) j["d"] = *f.d;
  if (f.rho) j["rho"] = *f.rho;
  if (f.threshold) j["threshold"] = *f.threshold;
  if (f.sampler) j["sampler"] = *f.sampler;
  if (f.axis) j["axis"] = *f.axis;
  if (f.grid) j["grid"] = *f.grid;
  if (f.risk) j["target_risk"] = *f.risk;
  if (f.k_star) j["k_star"] = *f.k_star;
  if (f.margin) j["margin"] = *f.margin;
  if (f.epsilon_d) j["epsilon_d"] = *f.epsilon_d;
  if (f.inject_fault) j["inject_fault"] = true;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation detection and alignment of Gaussian databases"};
  app.require_subcommand(1);
  Flags f;

  auto* det = app.add_subcommand("simulate-detection",
                                 "Monte-Carlo risk of the inner-product test");
  add_common(det, f);
  add_problem(det, f);
  det->add_option("--threshold", f.threshold, "standard or optimal")
      ->check(CLI::IsMember({"standard", "optimal"}));
  det->add_option("--sampler", f.sampler, "auto, databases or column-sums")
      ->check(CLI::IsMember({"auto", "databases", "column-sums"}));

  auto* rec = app.add_subcommand("simulate-recovery",
                                 "Monte-Carlo error of the ML alignment");
  add_common(rec, f);
  add_problem(rec, f);
  rec->add_option("--epsilon-d", f.epsilon_d,
                  "slack in the recovery converse");

  auto* curve = app.add_subcommand("curve", "rho^2 needed for a target risk");
  add_common(curve, f);
  curve->add_option("--n", f.n, "rows (fixed when axis=d)");
  curve->add_option("--d", f.d, "features (fixed when axis=n)");
  curve->add_option("--axis", f.axis, "d or n")
      ->check(CLI::IsMember({"d", "n"}));
  curve->add_option("--grid", f.grid, "start:stop:count");
  curve->add_option("--risk", f.risk, "target risk in (0,1)");
  curve->add_option("--kstar", f.k_star, "truncation level (0: default)");
  curve->add_option("--margin", f.margin, "truncation margin");
  curve->add_option("--epsilon-d", f.epsilon_d,
                    "slack in the recovery converse (required)");

  auto* ver = app.add_subcommand("verify", "run the oracle suite");
  add_common(ver, f);
  ver->add_flag("--inject-fault", f.inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dbcorr::kExitOk : dbcorr::kExitUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  dbcorr::ExperimentConfig config;
  try {
    const dbcorr::Command command = dbcorr::parse_command(chosen->get_name());
    if (f.config_path) {
      config = dbcorr::load_config_file(*f.config_path);
      if (config.command != command) {
        throw dbcorr::UsageError("command: config file is for '" +
                                 std::string(dbcorr::command_name(
                                     config.command)) + "'");
      }
    } else {
      config = dbcorr::default_config(command);
    }
    dbcorr::apply_json(config, overrides(f));
    const dbcorr::RunOutput result = dbcorr::run(config);
    dbcorr::emit(config, result, std::cout, std::cerr);
    return result.exit_code;
  } catch (const dbcorr::IoError& e) {
    std::cerr << "dbcorr: " << e.what() << '\n';
    return dbcorr::kExitIo;
  } catch (const dbcorr::UsageError& e) {
    std::cerr << "dbcorr: " << e.what() << '\n';
    return dbcorr::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "dbcorr: " << e.what() << '\n';
    return dbcorr::kExitUsage;
  }
}
