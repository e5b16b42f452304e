// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The full oracle suite behind `dbcorr verify`.

#ifndef DBCORR_VERIFY_HPP_
#define DBCORR_VERIFY_HPP_

#include <cstdint>
#include <vector>

#include "dbcorr/oracle.hpp"

namespace dbcorr {

struct VerifyOptions {
  std::uint64_t master_seed = 1;
  std::uint64_t trials = 200000;  // Monte-Carlo checks
  unsigned threads = 1;
  // Test hook: corrupts one closed-form reference so the suite must fail.
  bool inject_fault = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::size_t failures() const;
};

VerifyReport run_verify_suite(const VerifyOptions& options);

}  // namespace dbcorr

#endif  // DBCORR_VERIFY_HPP_
