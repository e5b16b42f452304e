// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/gen.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "dbcorr/errors.hpp"

namespace dbcorr {

DatabasePair::DatabasePair(RowMatrix x_, RowMatrix y_)
    : x(std::move(x_)), y(std::move(y_)) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError("X and Y must share n and d");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw DomainError("database entries must be finite");
  }
}

void fill_standard_normal(RowMatrix& m, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double* p = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) p[i] = normal(rng);
}

DatabasePair sample_null(const ProblemParams& params, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(params.n);
  const auto d = static_cast<Eigen::Index>(params.d);
  DatabasePair pair;
  pair.y.resize(n, d);
  pair.x.resize(n, d);
  fill_standard_normal(pair.y, rng);
  fill_standard_normal(pair.x, rng);
  return pair;
}

DatabasePair sample_null(const ProblemParams& params, std::uint64_t seed) {
  Rng rng(seed);
  return sample_null(params, rng);
}

DatabasePair sample_alt(const ProblemParams& params, const Permutation& perm,
                        Rng& rng) {
  if (params.rho == 0.0) {
    throw InvalidAlternate("alternate sampling requires rho != 0");
  }
  if (perm.size() != params.n) {
    throw ShapeError("permutation length must equal n");
  }
  const auto n = static_cast<Eigen::Index>(params.n);
  const auto d = static_cast<Eigen::Index>(params.d);
  DatabasePair pair;
  pair.y.resize(n, d);
  pair.x.resize(n, d);
  fill_standard_normal(pair.y, rng);
  fill_standard_normal(pair.x, rng);
  const double noise = std::sqrt(1.0 - params.rho * params.rho);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]);
    pair.x.row(i) = params.rho * pair.y.row(j) + noise * pair.x.row(i);
  }
  return pair;
}

DatabasePair sample_alt(const ProblemParams& params, const Permutation& perm,
                        std::uint64_t seed) {
  Rng rng(seed);
  return sample_alt(params, perm, rng);
}

}  // namespace dbcorr
