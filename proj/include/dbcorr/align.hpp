// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Maximum-likelihood recovery of the planted row permutation.

#ifndef DBCORR_ALIGN_HPP_
#define DBCORR_ALIGN_HPP_

#include <cstdint>

#include <Eigen/Dense>

#include "dbcorr/core.hpp"
#include "dbcorr/gen.hpp"

namespace dbcorr {

struct AlignmentResult {
  Permutation perm;
  double score = 0.0;  // sign(rho) sum_i X_i^T Y_{perm[i]}, summed in row order
};

// S_ij = rho_sign <X_i, Y_j>.
Eigen::MatrixXd score_matrix(const DatabasePair& pair, int rho_sign);

// Exact ML decoder: max-weight assignment on score_matrix. Ties go to the
// lexicographically smallest permutation.
AlignmentResult ml_decode(const DatabasePair& pair, double rho);

inline constexpr std::size_t kBruteForceCap = 8;

// Exhaustive search over S_n (n <= 8). Ties go to the lexicographically
// smallest permutation.
AlignmentResult brute_force_decode(const DatabasePair& pair, double rho);

struct ErrorRate {
  double rate = 0.0;
  double ci_radius = 0.0;  // 3 sigma binomial half-width
  std::uint64_t trials = 0;
};

// Fraction of trials in which ml_decode misses a uniformly drawn planted
// permutation.
ErrorRate recovery_error_mc(const ProblemParams& params, std::uint64_t trials,
                            const SeedSpec& seed, unsigned threads = 1);

// Decodes, then thresholds sign(rho) sum_i X_i^T Y_{decoded[i]} at
// threshold2 (1 iff >=).
int recovery_to_detection(const DatabasePair& pair, double rho,
                          double threshold2);

}  // namespace dbcorr

#endif  // DBCORR_ALIGN_HPP_
