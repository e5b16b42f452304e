// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form risk bounds for correlation detection and alignment recovery,
// and their inversion into rho^2 curves at a target risk.
//
// n and d are real here so that curves can be sampled between integers.

#ifndef DBCORR_BOUNDS_HPP_
#define DBCORR_BOUNDS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dbcorr {

// Chernoff exponent of the false-alarm tail:
// sqrt(1+g) - 1 - ln((1 + sqrt(1+g)) / 2).
double g_fa(double gamma);
// Chernoff exponent of the missed-detection tail; equals g_fa when rho = 0.
double g_md(double gamma, double rho);

struct ExponentPair {
  double g_fa;
  double g_md;
};
ExponentPair exponents(double gamma, double rho);

// exp(-d/2 g_fa(gamma)) + exp(-d/2 g_md(gamma)), and its logarithm.
double detection_bound_at(double d, double rho2, double gamma);
double log_detection_bound_at(double d, double rho2, double gamma);

struct GammaMinimum {
  double gamma;
  double bound;
};
// Minimizes detection_bound_at over gamma in (0, 4 rho^2): a 64-point scan
// followed by golden-section refinement of the best bracket. The endpoint
// limits are included, so gamma may come back as 0 or 4 rho^2 when the
// infimum is only approached there (always with bound >= 1).
GammaMinimum minimize_detection_bound(double d, double rho2);

// Minimized two-exponential bound; 2 at rho2 = 0.
double detection_ach_risk(double d, double rho2);

struct ChernoffLambdas {
  double lambda_fa;
  double lambda_md;
};
// Optimal Chernoff parameters for threshold t in (0, |rho| n d).
ChernoffLambdas chernoff_lambdas(double t, double n, double d, double rho);

// MGF of the sum-of-inner-products statistic:
// (1 - 2 n lambda |rho| - n^2 lambda^2 (1 - rho^2))^{-d/2}.
// Throws DomainError outside the region where the base is positive.
double mgf_alt(double lambda, double n, double d, double rho);
double mgf_null(double lambda, double n, double d);
double log_mgf_alt(double lambda, double n, double d, double rho);
double log_mgf_null(double lambda, double n, double d);

// max(0, 1 - sqrt((1 - rho^2)^{-dn} - 1)).
double unconditional_converse_risk(double n, double d, double rho2);

struct TruncationSchedule {
  std::uint64_t k_star = 0;
  std::uint64_t k_max = 0;  // floor(n)
  double margin = 0.0;
  // Entry i corresponds to k = k_star + i.
  std::vector<double> r, s, w, v;
  // Names of the failed inequalities; empty when the schedule is usable.
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
  std::uint64_t k_at(std::size_t i) const { return k_star + i; }
};

std::uint64_t default_k_star(double n);  // ceil(13 sqrt(n))

// r_k = (1+margin) sqrt(ln(e n / k)),
// s_k = (1+margin) sqrt(ln(e n / k)) max{2, sqrt((1-rho^2)/rho^2)},
// w_k = d k - 2 sqrt(d) k r_k, v_k = |rho| d k + 4 |rho| sqrt(d) k s_k.
// Records violated preconditions instead of throwing.
TruncationSchedule build_truncation_schedule(double n, double d, double rho2,
                                             std::uint64_t k_star,
                                             double margin);
// As above; throws ConditionViolated naming the first failing inequality.
TruncationSchedule truncation_schedule(double n, double d, double rho2,
                                       std::uint64_t k_star, double margin);

struct PsiValues {
  double psi1;
  double psi2;
  double psi;
};
PsiValues psi_values(const TruncationSchedule& schedule, double n, double d,
                     double rho2);

struct TruncatedConverse {
  double risk = 0.0;          // max of the two lower bounds below
  double unconditional = 0.0;
  double truncated = 0.0;     // 0 when the schedule or psi values are unusable
  bool schedule_valid = false;
  PsiValues psi{0.0, 0.0, 0.0};
  double first_moment_deficit = 0.0;   // bound on 1 - E0 of truncated L
  double second_moment_excess = 0.0;   // bound on E0 (truncated L)^2 - 1
};

// k_star = 0 selects default_k_star(n).
TruncatedConverse truncated_converse_detail(double n, double d, double rho2,
                                            std::uint64_t k_star = 0,
                                            double margin = 0.1);
double truncated_converse_risk(double n, double d, double rho2,
                               std::uint64_t k_star = 0, double margin = 0.1);

// b (1 - b^n) / (1 - b) with b = n (1 - rho^2)^{d/4}; n at b = 1.
double recovery_ach_perr(double n, double d, double rho2);
double recovery_ach_log_perr(double n, double d, double rho2);

// max(0, 1 - a^{-2} - 4 a^{-1}) with a = n (1 - rho^2)^{d (1 + eps) / 4}.
double recovery_conv_perr(double n, double d, double rho2,
                          double epsilon_d = 0.0);

enum class BoundKind {
  kDetectionAchievable,
  kDetectionConverse,
  kRecoveryAchievable,
  kRecoveryConverse,
};

const char* bound_kind_name(BoundKind kind);

struct InversionOptions {
  double tol = 1e-10;
  std::uint64_t k_star = 0;  // 0: default_k_star(n)
  double margin = 0.1;
  double epsilon_d = 0.0;
};

// rho^2 at which the selected bound crosses `target_risk`:
//   detection achievable: smallest rho^2 with risk bound <= R
//   recovery achievable:  smallest rho^2 with P_err bound <= R / 2
//   detection converse:   largest rho^2 with risk lower bound >= R
//   recovery converse:    largest rho^2 with P_err lower bound >= R
// Throws InversionUndefined when the pre-scan finds no crossing or the bound
// is not monotone.
double invert_for_rho2(BoundKind kind, double n, double d, double target_risk,
                       const InversionOptions& options = {});

struct BoundCurvePoint {
  double axis = 0.0;
  std::optional<double> rho2_det_ach;
  std::optional<double> rho2_det_conv;
  std::optional<double> rho2_rec_ach;
  std::optional<double> rho2_rec_conv;
  std::vector<std::string> warnings;
};

BoundCurvePoint curve_point(double axis, double n, double d,
                            double target_risk,
                            const InversionOptions& options = {});

}  // namespace dbcorr

#endif  // DBCORR_BOUNDS_HPP_
