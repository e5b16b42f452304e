// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Exact maximum-weight perfect matching on a dense square matrix.

#ifndef DBCORR_ASSIGNMENT_HPP_
#define DBCORR_ASSIGNMENT_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace dbcorr {

struct AssignmentSolution {
  std::vector<std::size_t> row_to_col;
  // Potentials for the minimization form with cost c_ij = max(S) - S_ij:
  // u_i + v_j <= c_ij everywhere, with equality on matched pairs.
  std::vector<double> u;
  std::vector<double> v;
  double shift = 0.0;  // max(S)
};

// Hungarian method with potentials, O(n^3). Among optimal matchings returns
// the lexicographically smallest row_to_col (see the tie rule in the .cpp).
AssignmentSolution solve_assignment_max(const Eigen::MatrixXd& scores);

// Largest violation of dual feasibility / complementary slackness.
double slackness_violation(const Eigen::MatrixXd& scores,
                           const AssignmentSolution& sol);

}  // namespace dbcorr

#endif  // DBCORR_ASSIGNMENT_HPP_
