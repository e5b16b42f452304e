// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Database pairs under the independent and correlated models.

#ifndef DBCORR_GEN_HPP_
#define DBCORR_GEN_HPP_

#include <cstdint>

#include <Eigen/Dense>

#include "dbcorr/core.hpp"

namespace dbcorr {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Rows are users, columns are features.
struct DatabasePair {
  RowMatrix x;
  RowMatrix y;

  DatabasePair() = default;
  // Throws ShapeError on mismatched shapes and DomainError on non-finite
  // entries.
  DatabasePair(RowMatrix x, RowMatrix y);

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }
};

// Fills `m` with i.i.d. N(0,1) draws in row-major order.
void fill_standard_normal(RowMatrix& m, Rng& rng);

// All 2nd entries i.i.d. N(0,1); params.rho is ignored.
DatabasePair sample_null(const ProblemParams& params, std::uint64_t seed);
DatabasePair sample_null(const ProblemParams& params, Rng& rng);

// Y i.i.d. N(0,1); X_i = rho Y_{perm[i]} + sqrt(1 - rho^2) Z_i.
DatabasePair sample_alt(const ProblemParams& params, const Permutation& perm,
                        std::uint64_t seed);
DatabasePair sample_alt(const ProblemParams& params, const Permutation& perm,
                        Rng& rng);

}  // namespace dbcorr

#endif  // DBCORR_GEN_HPP_
