// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Brute-force and Monte-Carlo cross-checks for the likelihood-ratio, second
// moment, Gaussian MGF and concentration results the bounds rely on.

#ifndef DBCORR_ORACLE_HPP_
#define DBCORR_ORACLE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dbcorr/bounds.hpp"
#include "dbcorr/core.hpp"
#include "dbcorr/gen.hpp"

namespace dbcorr {

struct LikelihoodSample {
  double l_value;
  double log_l;
};

inline constexpr std::size_t kLikelihoodCap = 8;
inline constexpr std::size_t kSecondMomentCap = 10;
inline constexpr std::size_t kMcSecondMomentCap = 6;

// log of (1/n!) sum_sigma prod_i N(X_i; rho Y_sigma(i), (1-rho^2) I) / N(X_i),
// reduced with log-sum-exp. n <= 8.
double log_likelihood_ratio(const DatabasePair& pair, double rho);
LikelihoodSample likelihood_sample(const DatabasePair& pair, double rho);

// E0 L^2 as a sum over cycle types of
// (count / n!) prod_k (1 - rho^{2k})^{-d N_k}. n <= 10.
double exact_second_moment(std::size_t n, double d, double rho2);
// Same sum, with the per-type multiplicities tallied by walking all of S_n.
double second_moment_by_enumeration(std::size_t n, double d, double rho2);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

enum class SecondMomentEstimator {
  // Draw Y only and integrate X out in closed form: E0[L^2 | Y] is a
  // permanent of exp(q_ab)/n!. Finite variance for rho^2 < 1/3.
  kConditional,
  // Average exp(2 log L) over full null draws. Infinite variance once
  // |rho| > 1/3; kept for comparison.
  kDirect,
};

// n <= 6.
McEstimate mc_second_moment(
    std::size_t n, std::uint64_t d, double rho, std::uint64_t trials,
    const SeedSpec& seed,
    SecondMomentEstimator estimator = SecondMomentEstimator::kConditional,
    unsigned threads = 1);

// E0 L over null draws; n <= 8.
McEstimate mc_likelihood_mean(std::size_t n, std::uint64_t d, double rho,
                              std::uint64_t trials, const SeedSpec& seed,
                              unsigned threads = 1);

// 1 - E0 |L - 1| over null draws; n <= 6. std_error is that of E0 |L - 1|.
McEstimate tv_risk_lower_bound_mc(std::size_t n, std::uint64_t d, double rho,
                                  std::uint64_t trials, const SeedSpec& seed,
                                  unsigned threads = 1);

// One named comparison. `passed` means statistic relation reference holds,
// with `sigma` the Monte-Carlo standard error where one applies.
struct CheckResult {
  std::string name;
  bool passed = false;
  double statistic = 0.0;
  double reference = 0.0;
  double sigma = 0.0;
  std::string relation;  // "~=" (within 3 sigma or rel tol), "<=" or ">="
};

// E exp(X^T R X / 2 + X^T b) = exp(b^T (I-R)^{-1} b / 2) det(I-R)^{-1/2}.
double quadratic_mgf_closed_form(const Eigen::MatrixXd& r,
                                 const Eigen::VectorXd& b);
// Requires I - R positive definite, and I - 2R positive definite so the
// estimator has finite variance; DomainError otherwise.
CheckResult quadratic_mgf_check(const Eigen::MatrixXd& r,
                                const Eigen::VectorXd& b,
                                std::uint64_t trials, const SeedSpec& seed,
                                unsigned threads = 1);

// E exp(-a|X|^2 - a|Y|^2 + b X^T Y) = ((1+2a)^2 - b^2)^{-d/2}.
double pair_mgf_closed_form(double a, double b, double d);
CheckResult pair_mgf_check(double a, double b, std::uint64_t d,
                           std::uint64_t trials, const SeedSpec& seed,
                           unsigned threads = 1);

// I - R for the cycle quadratic form sum_i (-rho^2 Y_i^2 + Y_i Y_{i+1}).
Eigen::MatrixXd cycle_circulant(std::size_t cycle_len, double rho);
// det(I - R) against (1 - rho^4)^{-L} (1 - rho^{2L})^2, 1e-8 relative.
CheckResult circulant_det_check(std::size_t cycle_len, double rho);

double laurent_massart_bound(const Eigen::VectorXd& alpha, double t);
// P(sum_i alpha_i (X_i^2 - 1) <= -t) <= bound, one result per t.
std::vector<CheckResult> laurent_massart_check(const Eigen::VectorXd& alpha,
                                               const std::vector<double>& t_grid,
                                               std::uint64_t trials,
                                               const SeedSpec& seed,
                                               unsigned threads = 1);

struct ChaosSplit {
  Eigen::VectorXd alpha;   // diagonal of A
  Eigen::VectorXd lambda;  // eigenvalues of the off-diagonal part
};
ChaosSplit chaos_split(const Eigen::MatrixXd& a);
double gaussian_chaos_bound(const ChaosSplit& split, double t);
// P(X^T A X - tr A >= t) <= bound, one result per t.
std::vector<CheckResult> gaussian_chaos_check(const Eigen::MatrixXd& a,
                                              const std::vector<double>& t_grid,
                                              std::uint64_t trials,
                                              const SeedSpec& seed,
                                              unsigned threads = 1);

// (1/2) sign(rho) [[2 rho I, sqrt(1-rho^2) I], [sqrt(1-rho^2) I, 0]] with
// blocks of size dim: the quadratic form behind sign(rho) sum X_i^T Y_i.
Eigen::MatrixXd truncation_chaos_matrix(std::size_t dim, double rho);

// Whether the truncation event holds for (pair, sigma): for every k from
// k_star to |F_sigma| and every k-subset T of the fixed points,
// sum_T |X_i|^2 > w_k, sum_T |Y_i|^2 > w_k and
// sign(rho) sum_T X_i^T Y_sigma(i) < v_k.
// `enumerate` walks the subsets (|F_sigma| <= 12); otherwise the extreme
// subsets are found by sorting, which decides the same event.
bool truncation_event_holds(const DatabasePair& pair, const Permutation& sigma,
                            double rho, const TruncationSchedule& schedule,
                            bool enumerate);

// Empirical P_{1|identity}(event) >= 1 - first-moment deficit bound.
CheckResult truncation_event_check(std::size_t n, std::uint64_t d, double rho,
                                   std::uint64_t k_star, double margin,
                                   std::uint64_t trials, const SeedSpec& seed,
                                   unsigned threads = 1);

// a x + (d/2) ln(1 / (1 - x^2)) on |x| < 1, its closed-form minimizer and
// minimum (d/2)(ln((sqrt(g+1)+1)/2) + 1 - sqrt(g+1)) with g = (2a/d)^2.
double log_barrier_objective(double a, double d, double x);
struct BarrierMinimum {
  double argmin;
  double minimum;
};
BarrierMinimum log_barrier_minimum(double a, double d);

// h(x) + g(x) <= (sqrt(2) - 1)^2 x on (0, 1].
double exponent_gap_h(double x);
double exponent_gap_g(double x);

}  // namespace dbcorr

#endif  // DBCORR_ORACLE_HPP_
