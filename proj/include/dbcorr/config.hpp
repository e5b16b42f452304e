// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration shared by the CLI and the Python module.

#ifndef DBCORR_CONFIG_HPP_
#define DBCORR_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dbcorr/detect.hpp"

namespace dbcorr {

enum class Command { kSimulateDetection, kSimulateRecovery, kCurve, kVerify };
enum class Format { kCsv, kJson };
enum class ThresholdMode { kStandard, kOptimal };
enum class Axis { kD, kN };

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  std::uint64_t count = 1;

  // Evenly spaced, endpoints included; a single point is `start`.
  std::vector<double> values() const;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Parses "start:stop:count". Throws UsageError.
GridSpec parse_grid(std::string_view text);
std::string format_grid(const GridSpec& grid);

struct ExperimentConfig {
  Command command = Command::kSimulateDetection;
  std::uint64_t n = 100;
  std::uint64_t d = 1000;
  double rho = 0.2;
  std::uint64_t trials = 10000;
  std::uint64_t master_seed = 1;
  std::string output_path;  // empty: standard output
  Format format = Format::kJson;
  unsigned threads = 1;
  ThresholdMode threshold = ThresholdMode::kStandard;
  Sampler sampler = Sampler::kAuto;
  // curve
  Axis axis = Axis::kD;
  std::optional<GridSpec> grid;
  double target_risk = 0.1;
  std::uint64_t k_star = 0;  // 0: ceil(13 sqrt n)
  double margin = 0.1;
  std::optional<double> epsilon_d;
  // verify
  bool inject_fault = false;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

const char* command_name(Command c);
Command parse_command(std::string_view name);

// Defaults differ per command (trial counts, output format).
ExperimentConfig default_config(Command command);

// Full serialization, including execution settings.
nlohmann::json config_to_json(const ExperimentConfig& config);
// Starts from default_config of the "command" key and overrides the keys that
// are present. Unknown keys and bad values raise UsageError naming the field.
ExperimentConfig config_from_json(const nlohmann::json& j);
// Overrides only the keys present in `j`; "command" must match if given.
void apply_json(ExperimentConfig& config, const nlohmann::json& j);

std::string render_config(const ExperimentConfig& config);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);

// The experiment record embedded in reports: the resolved config without the
// execution settings (threads, output path) that must not change results.
nlohmann::json experiment_record(const ExperimentConfig& config);

// Checks command-specific requirements. Throws UsageError naming the field.
void validate(const ExperimentConfig& config);

}  // namespace dbcorr

#endif  // DBCORR_CONFIG_HPP_
