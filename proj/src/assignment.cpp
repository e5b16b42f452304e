// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "dbcorr/errors.hpp"

namespace dbcorr {
namespace {

// Sum in row order, the same order the brute-force oracle uses.
double matching_score(const Eigen::MatrixXd& s,
                      const std::vector<std::size_t>& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    total += s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m[i]));
  }
  return total;
}

// Kuhn augmenting-path search restricted to the allowed edges, rows >= from.
bool completes(const std::vector<std::vector<std::size_t>>& allowed,
               std::size_t from, std::vector<bool> used_cols) {
  const std::size_t n = allowed.size();
  std::vector<std::ptrdiff_t> col_owner(n, -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment =
      [&](std::size_t row, std::vector<bool>& visited) {
        for (std::size_t c : allowed[row]) {
          if (used_cols[c] || visited[c]) continue;
          visited[c] = true;
          if (col_owner[c] < 0 ||
              augment(static_cast<std::size_t>(col_owner[c]), visited)) {
            col_owner[c] = static_cast<std::ptrdiff_t>(row);
            return true;
          }
        }
        return false;
      };
  for (std::size_t row = from; row < n; ++row) {
    std::vector<bool> visited(n, false);
    if (!augment(row, visited)) return false;
  }
  return true;
}

}  // namespace

AssignmentSolution solve_assignment_max(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw ShapeError("assignment needs a nonempty square matrix");
  }
  if (!s.allFinite()) throw DomainError("scores must be finite");
  const std::size_t n = static_cast<std::size_t>(s.rows());
  const double shift = s.maxCoeff();
  auto cost = [&](std::size_t i, std::size_t j) {
    return shift - s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };

  // 1-indexed potentials; p[j] = row matched to column j.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  AssignmentSolution sol;
  sol.shift = shift;
  sol.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) sol.row_to_col[p[j] - 1] = j - 1;
  sol.u.assign(u.begin() + 1, u.end());
  sol.v.assign(v.begin() + 1, v.end());

  // Tie rule: every perfect matching on the tight edges of a feasible dual is
  // optimal, so pick the lexicographically smallest one greedily. Exact ties
  // arise only in constructed inputs; a near-tie that loses in the row-order
  // sum is rejected below, so the returned score is never smaller.
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double tight_tol = 1e-12 * scale * static_cast<double>(n);
  std::vector<std::vector<std::size_t>> tight(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (cost(i, j) - sol.u[i] - sol.v[j] <= tight_tol) tight[i].push_back(j);
    }
  }
  std::vector<std::size_t> lex(n, 0);
  std::vector<bool> used_cols(n, false);
  bool ok = true;
  for (std::size_t i = 0; i < n && ok; ++i) {
    ok = false;
    for (std::size_t j : tight[i]) {
      if (used_cols[j]) continue;
      used_cols[j] = true;
      if (completes(tight, i + 1, used_cols)) {
        lex[i] = j;
        ok = true;
        break;
      }
      used_cols[j] = false;
    }
  }
  if (ok && lex != sol.row_to_col &&
      matching_score(s, lex) >= matching_score(s, sol.row_to_col)) {
    sol.row_to_col = lex;
  }
  return sol;
}

double slackness_violation(const Eigen::MatrixXd& s,
                           const AssignmentSolution& sol) {
  const std::size_t n = sol.row_to_col.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double reduced =
          sol.shift -
          s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
          sol.u[i] - sol.v[j];
      worst = std::max(worst, -reduced);
      if (sol.row_to_col[i] == j) worst = std::max(worst, std::abs(reduced));
    }
  }
  return worst;
}

}  // namespace dbcorr
