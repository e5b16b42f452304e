// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command drivers. Each returns the rendered report; diagnostics are kept
// apart so data output stays pipe-clean.

#ifndef DBCORR_RUNNER_HPP_
#define DBCORR_RUNNER_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "dbcorr/config.hpp"

namespace dbcorr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerifyFailed = 2;
inline constexpr int kExitIo = 3;

struct RunOutput {
  std::string body;
  int exit_code = kExitOk;
  std::vector<std::string> diagnostics;
};

inline constexpr const char* kCurveHeader =
    "axis,rho2_det_ach,rho2_det_conv,rho2_rec_ach,rho2_rec_conv";

RunOutput run_simulate_detection(const ExperimentConfig& config);
RunOutput run_simulate_recovery(const ExperimentConfig& config);
RunOutput run_curve(const ExperimentConfig& config);
RunOutput run_verify(const ExperimentConfig& config);
// Validates, then dispatches on config.command.
RunOutput run(const ExperimentConfig& config);

// Writes the body to config.output_path (or `out` when empty) and the
// diagnostics to `diag`. Throws IoError with the path on failure.
void emit(const ExperimentConfig& config, const RunOutput& result,
          std::ostream& out, std::ostream& diag);

// Shortest text with 17 significant digits that round-trips.
std::string format_number(double v);

}  // namespace dbcorr

#endif  // DBCORR_RUNNER_HPP_
