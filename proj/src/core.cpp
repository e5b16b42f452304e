// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dbcorr/core.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "dbcorr/errors.hpp"

namespace dbcorr {

ProblemParams::ProblemParams(std::uint64_t n_, std::uint64_t d_, double rho_)
    : n(n_), d(d_), rho(rho_) {
  if (n == 0) throw SizeError("n must be at least 1");
  if (d == 0) throw SizeError("d must be at least 1");
  if (!std::isfinite(rho) || !(std::abs(rho) < 1.0)) {
    throw DomainError("rho must satisfy |rho| < 1");
  }
}

ProblemParams ProblemParams::alternate(std::uint64_t n, std::uint64_t d,
                                       double rho) {
  ProblemParams p(n, d, rho);
  if (rho == 0.0) throw InvalidAlternate("alternate model requires rho != 0");
  return p;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label,
                          std::uint64_t index) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ fnv1a(label));
  return splitmix64(s ^ splitmix64(index));
}

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || seen[v]) {
      throw ShapeError("permutation map is not a bijection");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
  return Permutation(std::move(inv));
}

Permutation uniform_permutation(std::size_t n, Rng& rng) {
  if (n == 0) throw SizeError("permutation length must be at least 1");
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(m[i], m[pick(rng)]);
  }
  return Permutation(std::move(m));
}

Permutation uniform_permutation(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return uniform_permutation(n, rng);
}

CycleType cycle_decompose(const Permutation& p) {
  const std::size_t n = p.size();
  CycleType t;
  t.n = n;
  t.counts.assign(n + 1, 0);
  std::vector<bool> seen(n, false);
  std::size_t longest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = true;
      ++len;
    }
    ++t.counts[len];
    longest = std::max(longest, len);
  }
  t.counts.resize(longest + 1);
  return t;
}

BigInt factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

BigInt cycle_type_count(const CycleType& t) {
  std::size_t total = 0;
  BigInt denom = 1;
  for (std::size_t k = 1; k < t.counts.size(); ++k) {
    const std::uint32_t nk = t.counts[k];
    total += k * nk;
    for (std::uint32_t j = 0; j < nk; ++j) denom *= k;
    denom *= factorial(nk);
  }
  if (total != t.n) throw ShapeError("cycle type does not partition n");
  return factorial(t.n) / denom;
}

namespace {

void partitions(std::size_t remaining, std::size_t max_part,
                std::vector<std::uint32_t>& counts, std::size_t n,
                const std::function<void(const CycleType&)>& visit) {
  if (remaining == 0) {
    CycleType t;
    t.n = n;
    std::size_t longest = counts.size() - 1;
    while (longest > 0 && counts[longest] == 0) --longest;
    t.counts.assign(counts.begin(), counts.begin() + longest + 1);
    visit(t);
    return;
  }
  for (std::size_t part = std::min(remaining, max_part); part >= 1; --part) {
    ++counts[part];
    partitions(remaining - part, part, counts, n, visit);
    --counts[part];
  }
}

}  // namespace

void for_each_cycle_type(std::size_t n,
                         const std::function<void(const CycleType&)>& visit,
                         std::size_t cap) {
  if (n == 0) throw SizeError("n must be at least 1");
  if (n > cap) {
    throw SizeError("cycle-type enumeration capped at n = " +
                    std::to_string(cap));
  }
  std::vector<std::uint32_t> counts(n + 1, 0);
  partitions(n, n, counts, n, visit);
}

std::vector<CycleType> enumerate_cycle_types(std::size_t n, std::size_t cap) {
  std::vector<CycleType> out;
  for_each_cycle_type(
      n, [&](const CycleType& t) { out.push_back(t); }, cap);
  return out;
}

BigInt derangement_count(std::size_t n) {
  if (n == 0) return 1;
  BigInt prev2 = 1, prev1 = 0;  // !0, !1
  for (std::size_t k = 2; k <= n; ++k) {
    BigInt cur = (k - 1) * (prev1 + prev2);
    prev2 = std::move(prev1);
    prev1 = std::move(cur);
  }
  return prev1;
}

Rational prob_fixed_points(std::size_t n, std::size_t k) {
  if (n == 0) throw SizeError("n must be at least 1");
  if (k > n) throw DomainError("k must lie in [0, n]");
  BigInt binom = factorial(n) / (factorial(k) * factorial(n - k));
  return Rational(binom * derangement_count(n - k), factorial(n));
}

}  // namespace dbcorr
