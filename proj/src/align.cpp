// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/align.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dbcorr/assignment.hpp"
#include "dbcorr/errors.hpp"
#include "dbcorr/parallel.hpp"

namespace dbcorr {
namespace {

int sign_of(double rho) {
  if (rho == 0.0) throw InvalidAlternate("decoding requires rho != 0");
  return rho < 0.0 ? -1 : 1;
}

double row_order_score(const Eigen::MatrixXd& s,
                       const std::vector<std::size_t>& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    total += s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m[i]));
  }
  return total;
}

}  // namespace

Eigen::MatrixXd score_matrix(const DatabasePair& pair, int rho_sign) {
  if (rho_sign != 1 && rho_sign != -1) {
    throw DomainError("rho_sign must be +1 or -1");
  }
  Eigen::MatrixXd s = pair.x * pair.y.transpose();
  if (rho_sign < 0) s = -s;
  return s;
}

AlignmentResult ml_decode(const DatabasePair& pair, double rho) {
  const Eigen::MatrixXd s = score_matrix(pair, sign_of(rho));
  AssignmentSolution sol = solve_assignment_max(s);
  const double score = row_order_score(s, sol.row_to_col);
  return {Permutation(std::move(sol.row_to_col)), score};
}

AlignmentResult brute_force_decode(const DatabasePair& pair, double rho) {
  const int sign = sign_of(rho);
  const auto n = static_cast<std::size_t>(pair.n());
  if (n > kBruteForceCap) {
    throw SizeError("brute-force decoding is capped at n = 8");
  }
  const Eigen::MatrixXd s = score_matrix(pair, sign);
  std::vector<std::size_t> cur(n);
  std::iota(cur.begin(), cur.end(), std::size_t{0});
  std::vector<std::size_t> best = cur;
  double best_score = row_order_score(s, cur);
  // next_permutation walks S_n in lexicographic order, so keeping only
  // strict improvements resolves ties to the smallest permutation.
  while (std::next_permutation(cur.begin(), cur.end())) {
    const double sc = row_order_score(s, cur);
    if (sc > best_score) {
      best_score = sc;
      best = cur;
    }
  }
  return {Permutation(std::move(best)), best_score};
}

ErrorRate recovery_error_mc(const ProblemParams& params, std::uint64_t trials,
                            const SeedSpec& seed, unsigned threads) {
  if (trials == 0) throw DomainError("trials must be at least 1");
  if (params.rho == 0.0) throw InvalidAlternate("recovery requires rho != 0");
  auto blocks = parallel_blocks(
      trials, kTrialBlock, threads,
      [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
        std::uint64_t misses = 0;
        for (std::uint64_t i = b; i < e; ++i) {
          Rng rng(seed.trial_seed(i));
          const Permutation planted = uniform_permutation(params.n, rng);
          const DatabasePair pair = sample_alt(params, planted, rng);
          misses += ml_decode(pair, params.rho).perm != planted;
        }
        return misses;
      });
  std::uint64_t misses = 0;
  for (auto m : blocks) misses += m;
  ErrorRate r;
  r.trials = trials;
  r.rate = static_cast<double>(misses) / static_cast<double>(trials);
  r.ci_radius =
      3.0 * std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(trials));
  return r;
}

int recovery_to_detection(const DatabasePair& pair, double rho,
                          double threshold2) {
  const AlignmentResult res = ml_decode(pair, rho);
  const int sign = sign_of(rho);
  double aligned = 0.0;
  for (Eigen::Index i = 0; i < pair.n(); ++i) {
    aligned += pair.x.row(i).dot(
        pair.y.row(static_cast<Eigen::Index>(res.perm[static_cast<std::size_t>(i)])));
  }
  return (sign * aligned) >= threshold2 ? 1 : 0;
}

}  // namespace dbcorr
