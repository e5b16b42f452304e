// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The sum-of-inner-products test and Monte-Carlo estimates of its risk.

#ifndef DBCORR_DETECT_HPP_
#define DBCORR_DETECT_HPP_

#include <cstdint>

#include "dbcorr/bounds.hpp"
#include "dbcorr/core.hpp"
#include "dbcorr/gen.hpp"

namespace dbcorr {

// rho_sign * <sum_i X_i, sum_j Y_j>. rho_sign must be +1 or -1.
double sip_statistic(const DatabasePair& pair, int rho_sign);

// 1 iff t_stat >= threshold.
int threshold_test(double t_stat, double threshold);

// |rho| d n / 2.
double standard_threshold(const ProblemParams& params);

// Minimizer of the two-exponential risk bound over gamma in (0, 4 rho^2).
GammaMinimum optimal_gamma(const ProblemParams& params);
// Threshold sqrt(gamma) d n / 2 for a given gamma.
double threshold_for_gamma(const ProblemParams& params, double gamma);

struct RiskEstimate {
  double fa_rate = 0.0;
  double md_rate = 0.0;
  std::uint64_t trials = 0;
  double ci_radius = 0.0;  // 3 sigma binomial half-width, max over the rates

  double risk() const { return fa_rate + md_rate; }
};

// How one draw of T is produced. kColumnSums samples the two column-sum
// vectors directly; they are sufficient for T and have the exact joint law.
enum class Sampler { kAuto, kDatabases, kColumnSums };

// kAuto picks kDatabases when n d <= 10^4.
Sampler resolve_sampler(Sampler s, const ProblemParams& params);

// One draw of T under the null (alternate = false) or under the alternate
// with the given planted permutation (identity when empty).
double draw_statistic(const ProblemParams& params, bool alternate,
                      Sampler sampler, Rng& rng);

struct McOptions {
  unsigned threads = 1;
  Sampler sampler = Sampler::kAuto;
};

// False alarms from `trials` null draws, missed detections from `trials`
// alternate draws with the identity permutation. rho = 0 runs null vs null.
RiskEstimate monte_carlo_risk(const ProblemParams& params, double threshold,
                              std::uint64_t trials, const SeedSpec& seed,
                              const McOptions& options = {});

}  // namespace dbcorr

#endif  // DBCORR_DETECT_HPP_
